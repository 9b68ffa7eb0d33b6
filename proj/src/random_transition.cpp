#include "polyjet/random_transition.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "polyjet/calculus.hpp"

namespace polyjet {

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) {
        return lo + static_cast<double>(gen_() >> 11) * 0x1.0p-53 * (hi - lo);
    }
    std::size_t below(std::size_t k) { return static_cast<std::size_t>(gen_() % k); }
    // Short decimals keep printed maps readable.
    double coef(double lo, double hi) { return std::round(uniform(lo, hi) * 100) / 100; }

private:
    std::mt19937_64 gen_;
};

using Vec = std::vector<Expr>;

struct Factor {
    Vec forward;
    Vec inverse;
};

Vec compose(const Vec& outer, const std::vector<std::string>& names, const Vec& inner) {
    std::map<std::string, Expr> b;
    for (std::size_t k = 0; k < names.size(); ++k) b.emplace(names[k], inner[k]);
    Vec out;
    for (const auto& e : outer) out.push_back(substitute(e, b));
    return out;
}

Factor random_factor(const std::vector<std::string>& names, Rng& rng) {
    const std::size_t d = names.size();
    Vec id;
    for (const auto& n : names) id.push_back(Expr::variable(n));
    std::vector<Factor> steps;

    // Odd cubics on a random subset of coordinates (always at least one).
    {
        Factor f{id, id};
        const std::size_t forced = rng.below(d);
        for (std::size_t k = 0; k < d; ++k) {
            if (k != forced && rng.uniform(0, 1) < 0.5) continue;
            const double c = rng.coef(0.2, 0.6);
            f.forward[k] = id[k] + Expr(c) * pow(id[k], 3);
            f.inverse[k] = cubic_inverse(id[k], c);
        }
        steps.push_back(std::move(f));
    }
    // Shears.
    if (d >= 2) {
        const std::size_t count = 1 + rng.below(2);
        for (std::size_t s = 0; s < count; ++s) {
            const std::size_t k = rng.below(d);
            std::size_t j = rng.below(d - 1);
            if (j >= k) ++j;
            const double c = rng.coef(-0.3, 0.3);
            const int deg = 2 + static_cast<int>(rng.below(2));
            Factor f{id, id};
            f.forward[k] = id[k] + Expr(c) * pow(id[j], deg);
            f.inverse[k] = id[k] - Expr(c) * pow(id[j], deg);
            steps.push_back(std::move(f));
        }
    }
    // Affine: y = M v + b with M near the identity.
    {
        Eigen::MatrixXd M(d, d);
        Eigen::VectorXd b(d);
        for (std::size_t r = 0; r < d; ++r) {
            b(static_cast<Eigen::Index>(r)) = rng.coef(-0.2, 0.2);
            for (std::size_t c = 0; c < d; ++c) {
                M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    r == c ? rng.coef(0.8, 1.4) : rng.coef(-0.3, 0.3);
            }
        }
        const Eigen::MatrixXd Mi = M.inverse();
        Factor f;
        for (std::size_t r = 0; r < d; ++r) {
            const auto R = static_cast<Eigen::Index>(r);
            Vec fw{Expr(b(R))}, iv;
            double shift = 0;
            for (std::size_t c = 0; c < d; ++c) {
                const auto C = static_cast<Eigen::Index>(c);
                fw.push_back(Expr(M(R, C)) * id[c]);
                iv.push_back(Expr(Mi(R, C)) * id[c]);
                shift += Mi(R, C) * b(C);
            }
            iv.push_back(Expr(-shift));
            f.forward.push_back(sum(fw));
            f.inverse.push_back(sum(iv));
        }
        steps.push_back(std::move(f));
    }

    Factor out{id, id};
    for (const auto& s : steps) {
        out.forward = compose(s.forward, names, out.forward);
        out.inverse = compose(out.inverse, names, s.inverse);
    }
    return out;
}

}  // namespace

Expr cubic_inverse(const Expr& y, double c) {
    // v^3 + v/c - y/c = 0: v = cbrt(y/2c + s) - cbrt(s - y/2c), s = sqrt(y^2/4c^2 + 1/27c^3).
    const Expr half = y / Expr(2 * c);
    const Expr s = sqrt(pow(half, 2) + Expr(1.0 / (27 * c * c * c)));
    const Expr third(1.0 / 3.0);
    return exp(third * ln(half + s)) - exp(third * ln(s - half));
}

TransitionMap random_transition(const JetChart& chart, std::uint64_t seed) {
    Rng rng(seed);
    const auto& names = chart.names();
    const std::vector<std::string> tn(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(chart.m()));
    const std::vector<std::string> xn(names.begin() + static_cast<std::ptrdiff_t>(chart.m()),
                                      names.begin() + static_cast<std::ptrdiff_t>(chart.m() + chart.n()));
    auto t = random_factor(tn, rng);
    auto x = random_factor(xn, rng);
    return TransitionMap(chart, t.forward, t.inverse, x.forward, x.inverse);
}

}  // namespace polyjet
