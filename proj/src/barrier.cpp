#include "barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace reslab::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rho {
    double value, d1, d2;
};

// rho(r) = (p r / c)^(1/p) and its first two derivatives
Rho rho(double r, double p, double c) {
    const double kappa = std::pow(p / c, 1.0 / p);
    const double e = 1.0 / p;
    return {kappa * std::pow(r, e), kappa * e * std::pow(r, e - 1.0), kappa * e * (e - 1.0) * std::pow(r, e - 2.0)};
}

void smooth_derivs(const SmoothTerm& t, double arg, double& h, double& h1, double& h2) {
    if (t.kind == SmoothTerm::Kind::Quadratic) {
        h = t.k * arg * arg;
        h1 = 2.0 * t.k * arg;
        h2 = 2.0 * t.k;
    } else {
        h = t.k * (std::cosh(arg) - 1.0);
        h1 = t.k * std::sinh(arg);
        h2 = t.k * std::cosh(arg);
    }
}

double constraint_value(const Constraint& c, const Eigen::VectorXd& y) {
    double g = dot(c.a, y) + c.b;
    if (c.r >= 0) {
        if (!(y[c.r] > 0.0)) return kInf;
        g -= rho(y[c.r], c.p, c.c).value;
    }
    return g;
}

// The barrier Hessian is kept as H = M^T M. Factoring M by QR keeps the
// small curvature of near-rays accurate where forming H would round it away.
struct Local {
    double phi = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd rows;
};

class RowSink {
public:
    explicit RowSink(int n) : n_(n) {}

    Eigen::VectorXd& next() {
        if (used_ == rows_.size()) rows_.emplace_back(n_);
        Eigen::VectorXd& r = rows_[used_++];
        r.setZero();
        return r;
    }
    void sparse(const Sparse& a, double scale) {
        Eigen::VectorXd& r = next();
        for (const auto& [i, v] : a) r[i] += scale * v;
    }
    void unit(int i, double scale) { next()[i] = scale; }

    Eigen::MatrixXd matrix() const {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(used_) + n_, n_);
        for (std::size_t k = 0; k < used_; ++k) m.row(static_cast<Eigen::Index>(k)) = rows_[k].transpose();
        m.bottomRows(n_).setZero();
        return m;
    }

private:
    int n_;
    std::vector<Eigen::VectorXd> rows_;
    std::size_t used_ = 0;
};

class Barrier {
public:
    Barrier(const ConvexProgram& prog) : prog_(prog) {}

    int num_constraints() const { return static_cast<int>(prog_.cons.size()) + (prog_.level ? 1 : 0); }

    // phi_tau(y) = tau F(y) - sum log(-g_i(y)); +inf outside the domain
    double phi(const Eigen::VectorXd& y, double tau) const {
        double out = tau * prog_.objective(y);
        for (const auto& c : prog_.cons) {
            const double g = constraint_value(c, y);
            if (!(g < 0.0)) return kInf;
            out -= std::log(-g);
        }
        if (prog_.level) {
            double g = prog_.energy(y) - *prog_.level;
            if (prog_.sigma >= 0) g -= y[prog_.sigma];
            if (!(g < 0.0)) return kInf;
            out -= std::log(-g);
        }
        return std::isnan(out) ? kInf : out;
    }

    bool local(const Eigen::VectorXd& y, double tau, Local& out) const {
        const int n = prog_.n;
        out.phi = phi(y, tau);
        if (!std::isfinite(out.phi)) return false;

        RowSink sink(n);
        std::vector<double> h2s(prog_.smooth.size());
        Eigen::VectorXd gG = prog_.energy_lin;
        for (std::size_t k = 0; k < prog_.smooth.size(); ++k) {
            const auto& t = prog_.smooth[k];
            double h, h1;
            smooth_derivs(t, dot(t.a, y) + t.b, h, h1, h2s[k]);
            for (const auto& [i, vi] : t.a) gG[i] += h1 * vi;
        }

        out.grad = tau * prog_.obj_lin;
        if (prog_.include_energy) {
            out.grad += tau * gG;
            for (std::size_t k = 0; k < prog_.smooth.size(); ++k)
                sink.sparse(prog_.smooth[k].a, std::sqrt(tau * h2s[k]));
        }

        for (const auto& c : prog_.cons) {
            Eigen::VectorXd& row = sink.next();
            for (const auto& [i, v] : c.a) row[i] += v;
            double g = dot(c.a, y) + c.b;
            double curv = 0.0;
            if (c.r >= 0) {
                const Rho r = rho(y[c.r], c.p, c.c);
                g -= r.value;
                row[c.r] -= r.d1;
                curv = -r.d2;
            }
            out.grad += row / (-g);
            row /= std::abs(g);
            if (c.r >= 0 && curv > 0.0) sink.unit(c.r, std::sqrt(curv / (-g)));
        }
        if (prog_.level) {
            double g = prog_.energy(y) - *prog_.level;
            Eigen::VectorXd& row = sink.next();
            row = gG;
            if (prog_.sigma >= 0) {
                g -= y[prog_.sigma];
                row[prog_.sigma] -= 1.0;
            }
            out.grad += row / (-g);
            row /= std::abs(g);
            for (std::size_t k = 0; k < prog_.smooth.size(); ++k)
                sink.sparse(prog_.smooth[k].a, std::sqrt(h2s[k] / (-g)));
        }
        out.rows = sink.matrix();
        return true;
    }

private:
    const ConvexProgram& prog_;
};

// Newton direction for H = M^T M. A ridge at rounding level of M keeps the
// system nonsingular; the caller bounds the resulting step length.
Eigen::VectorXd newton_direction(Eigen::MatrixXd M, const Eigen::VectorXd& g) {
    const Eigen::Index n = g.size();
    const double scale = std::max(M.colwise().norm().maxCoeff(), g.lpNorm<Eigen::Infinity>());
    const double ridge = 1e-16 * (scale > 0.0 ? scale : 1.0);
    M.bottomRows(n).diagonal().setConstant(ridge);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    const auto R = qr.matrixR().topLeftCorner(n, n).triangularView<Eigen::Upper>();
    Eigen::VectorXd w = qr.colsPermutation().transpose() * (-g);
    R.transpose().solveInPlace(w);
    R.solveInPlace(w);
    Eigen::VectorXd dx = qr.colsPermutation() * w;
    if (!dx.allFinite() || g.dot(dx) >= 0.0) dx = -g;
    return dx;
}

EngineResult run_barrier(const ConvexProgram& prog, Eigen::VectorXd y, const EngineConfig& cfg, bool phase1,
                         long iterations_so_far) {
    Barrier barrier(prog);
    const int m = barrier.num_constraints();
    EngineResult res;
    res.iterations = iterations_so_far;
    double tau = 1.0;
    const double mu = 10.0;
    Local loc;
    if (prog.n == 0) {
        res.y = y;
        res.value = prog.objective(y);
        return res;
    }

    for (;;) {
        // centering
        for (int inner = 0;; ++inner) {
            if (!barrier.local(y, tau, loc)) break;
            const Eigen::VectorXd dx = newton_direction(std::move(loc.rows), loc.grad);
            const double slope = loc.grad.dot(dx);
            if (-slope / 2.0 <= 1e-11) break;

            // bounded growth per step keeps rays to infinity numerically resolvable
            const double reach = 10.0 * std::max(1.0, y.lpNorm<Eigen::Infinity>());
            const double len = dx.lpNorm<Eigen::Infinity>();
            double s = len > reach ? reach / len : 1.0;
            double trial = barrier.phi(y + s * dx, tau);
            while (!std::isfinite(trial) && s > 1e-30) {
                s *= 0.5;
                trial = barrier.phi(y + s * dx, tau);
            }
            while (trial > loc.phi + 0.25 * s * slope && s > 1e-16) {
                s *= 0.5;
                trial = barrier.phi(y + s * dx, tau);
            }
            if (!(trial < loc.phi)) break;  // no progress at machine precision
            y += s * dx;
            ++res.iterations;

            if (phase1 && y[prog.sigma] < 0.0) {
                res.status = EngineStatus::Converged;
                res.y = y;
                res.value = prog.objective(y);
                return res;
            }
            if (!phase1 && y.lpNorm<Eigen::Infinity>() > cfg.norm_bound &&
                prog.objective(y) < -cfg.value_bound) {
                res.status = EngineStatus::Unbounded;
                res.y = y;
                res.value = -kInf;
                return res;
            }
            if (res.iterations >= cfg.max_iters) {
                res.status = EngineStatus::MaxIters;
                res.y = y;
                res.value = prog.objective(y);
                res.gap = m / tau;
                return res;
            }
            if (inner > 500 && s < 1e-12) break;
        }
        const double value = prog.objective(y);
        res.gap = m == 0 ? 0.0 : m / tau;
        if (m == 0 || res.gap <= cfg.tol_abs + cfg.tol_rel * std::abs(value)) {
            res.status = EngineStatus::Converged;
            res.y = y;
            res.value = value;
            return res;
        }
        tau *= mu;
    }
}

}  // namespace

EngineResult solve_boxed(const ConvexProgram& prog, Eigen::VectorXd y0, const EngineConfig& cfg);

int ConvexProgram::add_variable() {
    energy_lin.conservativeResize(n + 1);
    energy_lin[n] = 0.0;
    obj_lin.conservativeResize(n + 1);
    obj_lin[n] = 0.0;
    return n++;
}

double ConvexProgram::energy(const Eigen::VectorXd& y) const {
    double total = energy_const + energy_lin.dot(y);
    for (const auto& t : smooth) {
        const double arg = dot(t.a, y) + t.b;
        total += t.kind == SmoothTerm::Kind::Quadratic ? t.k * arg * arg : t.k * (std::cosh(arg) - 1.0);
    }
    return total;
}

double ConvexProgram::objective(const Eigen::VectorXd& y) const {
    double out = obj_const + obj_lin.dot(y);
    if (include_energy) out += energy(y);
    return out;
}

double ConvexProgram::max_violation(const Eigen::VectorXd& y) const {
    double worst = -kInf;
    for (const auto& c : cons) worst = std::max(worst, constraint_value(c, y));
    if (level) {
        double g = energy(y) - *level;
        if (sigma >= 0) g -= y[sigma];
        worst = std::max(worst, g);
    }
    return worst;
}

EngineResult solve(const ConvexProgram& original, Eigen::VectorXd y0, const EngineConfig& cfg) {
    // A box far outside the divergence bound turns rays of decrease into
    // minimizers on the box, where Newton steps stay well conditioned.
    auto boxed = [&](double box, Eigen::VectorXd start) {
        ConvexProgram prog = original;
        for (int i = 0; i < original.n; ++i) {
            prog.cons.push_back(Constraint{{{i, 1.0}}, -box});
            prog.cons.push_back(Constraint{{{i, -1.0}}, -box});
        }
        return solve_boxed(prog, std::move(start), cfg);
    };
    const double box = cfg.box_factor * cfg.norm_bound;
    EngineResult res = boxed(box, std::move(y0));
    if (res.status != EngineStatus::Converged || res.y.lpNorm<Eigen::Infinity>() <= cfg.norm_bound) return res;
    // A flat recession direction also drifts out here. Only a value that
    // keeps falling as the box grows is a ray of decrease.
    const EngineResult wider = boxed(2.0 * box, res.y);
    const double noise = 1e-6 * (1.0 + std::abs(res.value)) + 1e-9 * box;
    if (wider.status == EngineStatus::Converged && wider.value >= res.value - noise)
        return res;
    res.status = EngineStatus::Unbounded;
    res.value = -kInf;
    return res;
}

EngineResult solve_boxed(const ConvexProgram& prog, Eigen::VectorXd y0, const EngineConfig& cfg) {
    const double viol = prog.max_violation(y0);
    if (viol < 0.0) return run_barrier(prog, std::move(y0), cfg, false, 0);

    EngineResult fail;
    fail.status = EngineStatus::Infeasible;
    fail.value = kInf;
    fail.y = y0;
    if (!std::isfinite(viol)) return fail;

    // phase I: minimize sigma subject to g_i(y) <= sigma, sigma >= -1
    ConvexProgram aux = prog;
    const int sigma = aux.add_variable();
    aux.sigma = sigma;
    aux.include_energy = false;
    aux.obj_lin.setZero();
    aux.obj_const = 0.0;
    aux.obj_lin[sigma] = 1.0;
    for (auto& c : aux.cons) c.a.emplace_back(sigma, -1.0);
    aux.cons.push_back(Constraint{{{sigma, -1.0}}, -1.0});
    Eigen::VectorXd y1(aux.n);
    y1.head(prog.n) = y0;
    y1[sigma] = viol + 1.0;

    EngineConfig phase_cfg = cfg;
    phase_cfg.tol_rel = 0.0;
    phase_cfg.tol_abs = 1e-12;
    const EngineResult first = run_barrier(aux, y1, phase_cfg, true, 0);
    if (first.status != EngineStatus::Converged || !(first.y[sigma] < 0.0)) {
        fail.iterations = first.iterations;
        return fail;
    }
    return run_barrier(prog, first.y.head(prog.n), cfg, false, first.iterations);
}

}  // namespace reslab::detail
