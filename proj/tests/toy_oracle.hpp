#pragma once

// Exhaustive check of every subset triple on a small composite space, written
// against Eigen. Uses the same mixing completion as the solver.

#include <algorithm>
#include <map>
#include <numbers>
#include <set>

#include "oracle.hpp"
#include "qdetect/solver.hpp"

namespace oracle::toy {

using qdetect::Complex;
using qdetect::Space;
using Masks = std::array<std::uint32_t, 3>;

struct Toy {
    std::size_t spatial = 0;
    std::size_t spin = 0;
    std::vector<oracle::Vec> phi;
    std::uint32_t present = 0;
    oracle::Vec psi;
};

inline Toy toy_from_vector(std::size_t d, std::size_t n, const oracle::Vec &psi) {
    Toy t{d, n, {}, 0, psi};
    for (std::size_t m = 0; m < n; ++m) {
        oracle::Vec v(static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i) {
            v(static_cast<Eigen::Index>(i)) = psi(static_cast<Eigen::Index>(i * n + m));
        }
        if (v.norm() > 1e-10 * psi.norm()) {
            t.present |= 1u << m;
        }
        t.phi.push_back(v);
    }
    return t;
}

inline Toy make_toy(std::size_t d, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const oracle::Mat u = Eigen::HouseholderQR<oracle::Mat>(
                              oracle::to_eigen(oracle::random_operator(d, Space::spatial, gen)))
                              .householderQ();
    std::uniform_int_distribution<std::size_t> group(0, std::min(d, n) - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::normal_distribution<double> nd;
    Toy t{d, n, {}, 0, oracle::Vec::Zero(static_cast<Eigen::Index>(d * n))};
    for (std::size_t m = 0; m < n; ++m) {
        oracle::Vec v = oracle::Vec::Zero(static_cast<Eigen::Index>(d));
        if (coin(gen) > 0.2) {
            v = Complex(nd(gen), nd(gen)) * u.col(static_cast<Eigen::Index>(group(gen)));
            t.present |= 1u << m;
        }
        t.phi.push_back(v);
        for (std::size_t i = 0; i < d; ++i) {
            t.psi(static_cast<Eigen::Index>(i * n + m)) = v(static_cast<Eigen::Index>(i));
        }
    }
    if (t.present == 0) {
        return make_toy(d, n, seed + 1000);
    }
    return t;
}

inline oracle::Mat orthonormal_columns(const std::vector<oracle::Vec> &vs, std::size_t d) {
    if (vs.empty()) {
        return oracle::Mat(d, 0);
    }
    oracle::Mat a(d, vs.size());
    for (std::size_t k = 0; k < vs.size(); ++k) {
        a.col(static_cast<Eigen::Index>(k)) = vs[k];
    }
    Eigen::CompleteOrthogonalDecomposition<oracle::Mat> cod(a);
    cod.setThreshold(1e-10);
    const oracle::Mat q = cod.householderQ();
    return q.leftCols(cod.rank());
}

inline oracle::Mat projector(const oracle::Mat &q) {
    return q * q.adjoint();
}

struct ToySlot {
    bool feasible = false;
    oracle::Mat fixed;     // projector onto the fixed span
    oracle::Mat property;  // with the mixing completion for its slot
};

// K basis: standard basis vectors projected off the channel span, in index order.
inline std::vector<oracle::Vec> freedom_basis(const Toy &t) {
    std::vector<oracle::Vec> present;
    for (std::size_t m = 0; m < t.spin; ++m) {
        if (t.present >> m & 1u) {
            present.push_back(t.phi[m]);
        }
    }
    oracle::Mat q = orthonormal_columns(present, t.spatial);
    std::vector<oracle::Vec> out;
    for (std::size_t i = 0; i < t.spatial; ++i) {
        oracle::Vec e = oracle::Vec::Zero(static_cast<Eigen::Index>(t.spatial));
        e(static_cast<Eigen::Index>(i)) = 1.0;
        oracle::Vec r = e - q * (q.adjoint() * e);
        for (const auto &k : out) {
            r -= k * k.dot(r);
        }
        if (r.norm() > 1e-10) {
            r /= r.norm();
            out.push_back(r);
            q.conservativeResize(Eigen::NoChange, q.cols() + 1);
            q.col(q.cols() - 1) = r;
        }
    }
    return out;
}

inline ToySlot toy_slot(const Toy &t, std::uint32_t mask, std::size_t slot, const std::vector<oracle::Vec> &k) {
    std::vector<oracle::Vec> fixed;
    std::vector<oracle::Vec> gone;
    for (std::size_t m = 0; m < t.spin; ++m) {
        if (t.present >> m & 1u) {
            (mask >> m & 1u ? fixed : gone).push_back(t.phi[m]);
        }
    }
    const oracle::Mat qf = orthonormal_columns(fixed, t.spatial);
    const oracle::Mat qg = orthonormal_columns(gone, t.spatial);
    ToySlot out;
    const double cosine = (qf.cols() == 0 || qg.cols() == 0)
                              ? 0.0
                              : Eigen::JacobiSVD<oracle::Mat>(qf.adjoint() * qg).singularValues()(0);
    out.feasible = cosine <= 1e-8;
    out.fixed = projector(qf);
    out.property = out.fixed;
    if (k.size() == 1) {
        out.property += k[0] * k[0].adjoint();
    } else if (k.size() >= 2) {
        oracle::Vec rest = oracle::Vec::Zero(k[0].size());
        for (std::size_t j = 1; j < k.size(); ++j) {
            rest += k[j];
        }
        rest /= rest.norm();
        const double angle = std::numbers::pi / 4.0 + static_cast<double>(slot) * std::numbers::pi / 3.0;
        const oracle::Vec c = std::cos(angle) * k[0] + std::sin(angle) * rest;
        out.property += c * c.adjoint();
    }
    return out;
}

inline double comm(const oracle::Mat &a, const oracle::Mat &b) {
    return (a * b - b * a).norm();
}

inline double c10(const Toy &t, const oracle::Mat &r) {
    const oracle::Mat lifted = oracle::kron(r, oracle::Mat::Identity(t.spin, t.spin));
    const oracle::Vec in = lifted * t.psi;
    return std::min(in.norm(), (t.psi - in).norm()) / t.psi.norm();
}

struct ToyExpectation {
    std::map<Masks, std::array<double, 4>> mixing;  // C.1-C.3, C.10
    std::set<Masks> any_completion;
};

inline ToyExpectation brute_force(const Toy &t) {
    constexpr double warn = 1e-6;
    const auto k = freedom_basis(t);
    const std::uint32_t count = 1u << t.spin;
    std::array<std::vector<ToySlot>, 3> slots;
    for (std::size_t s = 0; s < 3; ++s) {
        for (std::uint32_t mask = 0; mask < count; ++mask) {
            slots[s].push_back(toy_slot(t, mask, s, k));
        }
    }
    ToyExpectation out;
    for (std::uint32_t a = 0; a < count; ++a) {
        for (std::uint32_t b = 0; b < count; ++b) {
            for (std::uint32_t c = 0; c < count; ++c) {
                const auto &x = slots[0][a];
                const auto &y = slots[1][b];
                const auto &z = slots[2][c];
                if (!x.feasible || !y.feasible || !z.feasible) {
                    continue;
                }
                const double cond10 = std::min({c10(t, x.fixed), c10(t, y.fixed), c10(t, z.fixed)});
                if (!(cond10 > warn)) {
                    continue;
                }
                const Masks masks{a, b, c};
                const std::array<double, 4> measured{comm(x.property, y.property), comm(x.property, z.property),
                                                     comm(y.property, z.property), cond10};
                if (measured[0] > warn && measured[1] > warn && measured[2] > warn) {
                    out.mixing[masks] = measured;
                }
                if (k.size() >= 2 || (comm(x.fixed, y.fixed) > warn && comm(x.fixed, z.fixed) > warn &&
                                      comm(y.fixed, z.fixed) > warn)) {
                    out.any_completion.insert(masks);
                }
            }
        }
    }
    return out;
}

inline bool kept_by_pruning(const Masks &m, const Toy &t, const qdetect::EnumerationOptions &o) {
    const std::uint32_t lowest = t.present & (~t.present + 1u);
    for (std::uint32_t mask : m) {
        if (o.absent_channel_pruning && (mask & ~t.present) != 0) {
            return false;
        }
        if (o.complement_pruning && (mask & lowest) == 0) {
            return false;
        }
    }
    return true;
}

}  // namespace oracle::toy
