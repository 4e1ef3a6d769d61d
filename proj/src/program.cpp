#include "program.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "union_find.hpp"

namespace reslab::detail {

namespace {

struct ClassTerm {
    std::map<int, double> l;
    double offset = 0.0;
    ScalarConvex w;
};

struct ClassHyper {
    std::vector<int> classes;
    double mu = 0.0;
};

// affine expression over some index space
struct Affine {
    std::map<int, double> a;
    double b = 0.0;
};

Sparse to_sparse(const std::map<int, double>& m) {
    Sparse out;
    for (const auto& [i, v] : m)
        if (v != 0.0) out.emplace_back(i, v);
    return out;
}

struct PowerInit {
    int r;
    Sparse a;
    double b;
    double p, c;
};

struct HyperInit {
    int u, l;
    std::vector<std::pair<Sparse, double>> members;
};

}  // namespace

VertexVector Assembly::classes(const Eigen::VectorXd& y) const {
    VertexVector f(static_cast<Eigen::Index>(coord_a.size()));
    for (std::size_t c = 0; c < coord_a.size(); ++c) f[c] = dot(coord_a[c], y) + coord_b[c];
    return f;
}

EngineConfig engine_config(const SolveConfig& cfg) {
    EngineConfig e;
    e.tol_rel = cfg.tol_rel;
    e.tol_abs = cfg.tol_abs;
    e.max_iters = cfg.max_iters;
    e.norm_bound = cfg.divergence_norm_bound;
    e.value_bound = cfg.divergence_value_bound;
    return e;
}

Assembly assemble(const NetworkForm& form, const Request& req) {
    const int nc = static_cast<int>(form.num_classes());
    Assembly out;
    VertexVector linear = req.linear.size() == nc ? req.linear : VertexVector::Zero(nc);

    // 1. merge Dirichlet classes into the boundary point, then fix values
    UnionFind uf(nc);
    const auto boundary = form.boundary_class();
    if (boundary)
        for (int c : form.dirichlet_classes()) uf.unite(c, *boundary);
    std::map<int, double> fixed;  // group root -> value
    auto fix = [&](int c, double v) {
        const int root = uf.find(c);
        auto [it, fresh] = fixed.emplace(root, v);
        if (!fresh && it->second != v) out.infeasible = true;
    };
    for (int c : form.post_dirichlet_classes()) fix(c, 0.0);
    if (!boundary)
        for (int c : form.dirichlet_classes()) fix(c, 0.0);
    for (const auto& pin : req.pins) fix(pin.coordinate, pin.value);

    std::vector<int> group_of(nc, -1);
    std::map<int, int> group_of_root;
    int n_groups = 0;
    for (int c = 0; c < nc; ++c) {
        const int root = uf.find(c);
        if (fixed.count(root)) continue;
        auto [it, fresh] = group_of_root.emplace(root, n_groups);
        if (fresh) ++n_groups;
        group_of[c] = it->second;
    }
    auto fixed_value = [&](int c) { return fixed.at(uf.find(c)); };

    // 2. class-level terms
    std::vector<ClassTerm> terms;
    for (const auto& e : form.edges()) {
        if (e.cu == e.cv || e.w.is_identically_zero()) continue;
        terms.push_back({{{e.cu, 1.0}, {e.cv, -1.0}}, 0.0, e.w});
    }
    for (const auto& t : form.linear_terms()) {
        if (t.w.is_identically_zero() || t.coeffs.empty()) continue;
        ClassTerm ct{{}, 0.0, t.w};
        double sum = 0.0;
        for (const auto& [c, v] : t.coeffs) {
            ct.l[c] += v;
            sum += v;
        }
        if (boundary && sum != 0.0) ct.l[*boundary] -= sum;
        terms.push_back(std::move(ct));
    }
    for (const auto& p : req.penalties) {
        if (p.w.is_identically_zero()) continue;
        terms.push_back({{{p.coordinate, 1.0}}, -p.target, p.w});
    }
    std::vector<ClassHyper> hypers;
    for (const auto& h : form.hyperedges())
        if (h.mu > 0.0 && h.classes.size() >= 2) hypers.push_back({h.classes, h.mu});

    auto group_affine = [&](const std::map<int, double>& l, double offset) {
        Affine g{{}, offset};
        for (const auto& [c, v] : l) {
            if (group_of[c] >= 0)
                g.a[group_of[c]] += v;
            else
                g.b += v * fixed_value(c);
        }
        return g;
    };

    // 3. zero-energy directions: components of groups on which every term is
    //    shift invariant
    UnionFind comp(n_groups);
    std::vector<Affine> term_groups;
    for (const auto& t : terms) {
        Affine g = group_affine(t.l, t.offset);
        int anchor = -1;
        for (const auto& [gi, v] : g.a) {
            if (v == 0.0) continue;
            if (anchor < 0)
                anchor = gi;
            else
                comp.unite(anchor, gi);
        }
        term_groups.push_back(std::move(g));
    }
    for (const auto& h : hypers) {
        int anchor = -1;
        for (int c : h.classes) {
            if (group_of[c] < 0) continue;
            if (anchor < 0)
                anchor = group_of[c];
            else
                comp.unite(anchor, group_of[c]);
        }
    }
    std::vector<bool> flat(n_groups, true);
    for (const auto& g : term_groups) {
        double sum = 0.0, scale = 0.0;
        int any = -1;
        for (const auto& [gi, v] : g.a) {
            if (v == 0.0) continue;
            sum += v;
            scale += std::abs(v);
            any = gi;
        }
        if (any >= 0 && std::abs(sum) > 1e-12 * scale) flat[comp.find(any)] = false;
    }
    for (const auto& h : hypers) {
        int any = -1;
        bool touches_fixed = false;
        for (int c : h.classes) {
            if (group_of[c] < 0)
                touches_fixed = true;
            else
                any = group_of[c];
        }
        if (any >= 0 && touches_fixed) flat[comp.find(any)] = false;
    }

    std::vector<double> lin_group(n_groups, 0.0);
    double lin_fixed = 0.0;
    for (int c = 0; c < nc; ++c) {
        if (group_of[c] >= 0)
            lin_group[group_of[c]] += linear[c];
        else
            lin_fixed += linear[c] * fixed_value(c);
    }
    const double lin_scale = 1.0 + linear.lpNorm<1>();
    std::map<int, double> comp_sum;
    std::map<int, int> comp_first;
    for (int g = 0; g < n_groups; ++g) {
        const int root = comp.find(g);
        if (!flat[root]) continue;
        comp_sum[root] += lin_group[g];
        comp_first.emplace(root, g);
    }
    std::vector<bool> gauged(n_groups, false);
    for (const auto& [root, sum] : comp_sum) {
        if (std::abs(sum) > 1e-12 * lin_scale) {
            out.flat_direction_hit = true;
            return out;
        }
        gauged[comp_first[root]] = true;
    }

    // 4. final variables, with one eliminated in hyperplane mode
    std::vector<int> var_of_group(n_groups, -1);
    int nv = 0;
    for (int g = 0; g < n_groups; ++g)
        if (!gauged[g]) var_of_group[g] = nv++;
    std::vector<Affine> group_expr(n_groups);
    for (int g = 0; g < n_groups; ++g)
        if (var_of_group[g] >= 0) group_expr[g].a[var_of_group[g]] = 1.0;

    if (req.mode == Mode::Hyperplane) {
        int k = -1;
        for (int g = 0; g < n_groups; ++g)
            if (var_of_group[g] >= 0 && (k < 0 || std::abs(lin_group[g]) > std::abs(lin_group[k]))) k = g;
        if (k < 0 || lin_group[k] == 0.0) {
            if (std::abs(lin_fixed - req.s) > 1e-12 * (1.0 + std::abs(req.s))) out.infeasible = true;
        } else {
            const int removed = var_of_group[k];
            for (int g = 0; g < n_groups; ++g)
                if (var_of_group[g] > removed) --var_of_group[g];
            --nv;
            for (int g = 0; g < n_groups; ++g) {
                group_expr[g] = Affine{};
                if (g != k && var_of_group[g] >= 0) group_expr[g].a[var_of_group[g]] = 1.0;
            }
            Affine& ek = group_expr[k];
            ek.b = (req.s - lin_fixed) / lin_group[k];
            for (int g = 0; g < n_groups; ++g)
                if (g != k && var_of_group[g] >= 0 && lin_group[g] != 0.0)
                    ek.a[var_of_group[g]] = -lin_group[g] / lin_group[k];
        }
    }

    out.coord_a.resize(nc);
    out.coord_b.resize(nc);
    for (int c = 0; c < nc; ++c) {
        if (group_of[c] >= 0) {
            out.coord_a[c] = to_sparse(group_expr[group_of[c]].a);
            out.coord_b[c] = group_expr[group_of[c]].b;
        } else {
            out.coord_b[c] = fixed_value(c);
        }
    }
    auto var_affine = [&](const std::map<int, double>& l, double offset) {
        Affine v{{}, offset};
        for (const auto& [c, coef] : l) {
            for (const auto& [j, x] : out.coord_a[c]) v.a[j] += coef * x;
            v.b += coef * out.coord_b[c];
        }
        return v;
    };

    // 5. the program
    ConvexProgram& prog = out.prog;
    prog = ConvexProgram(nv);
    std::vector<PowerInit> power_init;
    std::vector<HyperInit> hyper_init;
    for (const auto& t : terms) {
        const Affine v = var_affine(t.l, t.offset);
        const Sparse a = to_sparse(v.a);
        if (a.empty()) {
            const ExtNonNeg val = t.w(v.b);
            if (val.is_infinite())
                out.infeasible = true;
            else
                prog.energy_const += val.to_double();
            continue;
        }
        const double cap = t.w.cap();
        if (std::isfinite(cap)) {
            Sparse neg = a;
            for (auto& [i, x] : neg) x = -x;
            prog.cons.push_back({a, v.b - cap});
            prog.cons.push_back({neg, -v.b - cap});
        }
        const ScalarConvex& base = t.w.uncapped();
        if (const auto* cm = std::get_if<CoshMinusOne>(&base.variant())) {
            if (cm->c > 0.0) prog.smooth.push_back({a, v.b, SmoothTerm::Kind::Cosh, cm->c});
        } else if (const auto* sp = std::get_if<ScaledPower>(&base.variant())) {
            if (sp->c == 0.0) continue;
            if (sp->p == 2.0) {
                prog.smooth.push_back({a, v.b, SmoothTerm::Kind::Quadratic, sp->c / 2.0});
                continue;
            }
            const int r = prog.add_variable();
            Sparse neg = a;
            for (auto& [i, x] : neg) x = -x;
            if (sp->p == 1.0) {
                // |d| <= r, energy c r
                prog.energy_lin[r] = sp->c;
                Sparse pa = a, na = neg;
                pa.emplace_back(r, -1.0);
                na.emplace_back(r, -1.0);
                prog.cons.push_back({pa, v.b});
                prog.cons.push_back({na, -v.b});
            } else {
                prog.energy_lin[r] = 1.0;
                prog.cons.push_back({a, v.b, r, sp->p, sp->c});
                prog.cons.push_back({neg, -v.b, r, sp->p, sp->c});
            }
            power_init.push_back({r, a, v.b, sp->p, sp->c});
        }
    }
    for (const auto& h : hypers) {
        std::vector<std::pair<Sparse, double>> members;
        bool all_const = true;
        double lo = 0.0, hi = 0.0;
        for (std::size_t i = 0; i < h.classes.size(); ++i) {
            const Affine v = var_affine({{h.classes[i], 1.0}}, 0.0);
            members.emplace_back(to_sparse(v.a), v.b);
            if (!members.back().first.empty()) all_const = false;
            lo = i == 0 ? v.b : std::min(lo, v.b);
            hi = i == 0 ? v.b : std::max(hi, v.b);
        }
        if (all_const) {
            prog.energy_const += h.mu * (hi - lo) * (hi - lo);
            continue;
        }
        const int u = prog.add_variable();
        const int l = prog.add_variable();
        for (const auto& [a, b] : members) {
            Sparse up = a, dn;
            up.emplace_back(u, -1.0);
            for (const auto& [i, x] : a) dn.emplace_back(i, -x);
            dn.emplace_back(l, 1.0);
            prog.cons.push_back({up, b});
            prog.cons.push_back({dn, -b});
        }
        prog.smooth.push_back({{{u, 1.0}, {l, -1.0}}, 0.0, SmoothTerm::Kind::Quadratic, h.mu});
        hyper_init.push_back({u, l, std::move(members)});
    }

    // objective
    if (req.mode != Mode::Hyperplane) {
        for (int c = 0; c < nc; ++c) {
            if (linear[c] == 0.0) continue;
            for (const auto& [j, x] : out.coord_a[c]) prog.obj_lin[j] -= linear[c] * x;
            prog.obj_const -= linear[c] * out.coord_b[c];
        }
    }
    if (req.mode == Mode::Sublevel) {
        prog.include_energy = false;
        prog.level = req.level;
    }

    // 6. strictly feasible start where possible
    auto start = [&](double delta) {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(prog.n);
        for (const auto& pi : power_init) {
            const double d = std::abs(dot(pi.a, y) + pi.b) + delta;
            y[pi.r] = pi.p == 1.0 ? d : pi.c / pi.p * std::pow(d, pi.p);
        }
        for (const auto& hi : hyper_init) {
            double lo = 0.0, up = 0.0;
            for (std::size_t i = 0; i < hi.members.size(); ++i) {
                const double v = dot(hi.members[i].first, y) + hi.members[i].second;
                lo = i == 0 ? v : std::min(lo, v);
                up = i == 0 ? v : std::max(up, v);
            }
            y[hi.u] = up + delta;
            y[hi.l] = lo - delta;
        }
        return y;
    };
    double delta = 1.0;
    out.y0 = start(delta);
    if (req.mode == Mode::Sublevel) {
        while (prog.energy(out.y0) >= 0.5 * req.level && delta > 1e-12) {
            delta *= 0.5;
            out.y0 = start(delta);
        }
    }
    return out;
}

}  // namespace reslab::detail
