#include "glem/phylo.hpp"

#include "glem/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace glem {

namespace {

// ---------------------------------------------------------------------------
// Circular ordering by agglomeration.
//
// Active nodes live in clusters of one or two linked nodes. Each round picks
// the cluster pair minimizing the neighbor-joining criterion on cluster-
// averaged distances, then the node pair minimizing the same criterion with
// the chosen clusters' nodes treated individually. Chains of three nodes are
// immediately replaced by two fresh nodes (3-way reduction); the reductions
// are replayed backwards at the end to expand the final cycle.
// ---------------------------------------------------------------------------

struct Reduction {
    int a, b, c; // chain replaced
    int u, v;    // nodes created (u on the a side, v on the c side)
};

class CycleBuilder {
public:
    explicit CycleBuilder(const DistanceMatrix& input) : n_(static_cast<int>(input.size())) {
        const int cap = 6 * n_ + 8;
        dist_.assign(static_cast<std::size_t>(cap), std::vector<double>(static_cast<std::size_t>(cap), 0.0));
        nbr_.assign(static_cast<std::size_t>(cap), -1);
        for (int i = 0; i < n_; ++i) {
            active_.push_back(i);
            for (int j = i + 1; j < n_; ++j)
                dist_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    dist_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                        input.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
        next_id_ = n_;
    }

    /// Circular order of taxon indices, canonicalized (taxon 0 first, then
    /// the smaller-indexed direction).
    std::vector<int> build() {
        if (n_ <= 3) {
            std::vector<int> cycle(static_cast<std::size_t>(n_));
            std::iota(cycle.begin(), cycle.end(), 0);
            return cycle;
        }
        while (static_cast<int>(active_.size()) > 3)
            agglomerate_once();
        std::vector<int> cycle = active_;
        for (std::size_t r = reductions_.size(); r-- > 0;)
            expand(cycle, reductions_[r]);
        return canonicalize(cycle);
    }

private:
    struct Cluster {
        int first;  // smaller node id
        int second; // partner or -1
        int size() const { return second < 0 ? 1 : 2; }
        int node(int k) const { return k == 0 ? first : second; }
    };

    double d(int x, int y) const {
        return dist_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
    }

    std::vector<Cluster> clusters() const {
        std::vector<Cluster> out;
        for (int id : active_) {
            const int partner = nbr_[static_cast<std::size_t>(id)];
            if (partner >= 0 && partner < id)
                continue; // already represented by the partner
            out.push_back({id, partner});
        }
        return out;
    }

    static double cluster_distance(const CycleBuilder& self, const Cluster& a, const Cluster& b) {
        double sum = 0.0;
        for (int i = 0; i < a.size(); ++i)
            for (int j = 0; j < b.size(); ++j)
                sum += self.d(a.node(i), b.node(j));
        return sum / static_cast<double>(a.size() * b.size());
    }

    void agglomerate_once() {
        const std::vector<Cluster> cs = clusters();
        const int m = static_cast<int>(cs.size());

        // Cluster-level selection: (m - 2) d(A,B) - R(A) - R(B).
        std::vector<std::vector<double>> cd(static_cast<std::size_t>(m),
                                            std::vector<double>(static_cast<std::size_t>(m), 0.0));
        std::vector<double> r(static_cast<std::size_t>(m), 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                const double v = cluster_distance(*this, cs[static_cast<std::size_t>(i)],
                                                  cs[static_cast<std::size_t>(j)]);
                cd[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
                cd[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
                r[static_cast<std::size_t>(i)] += v;
                r[static_cast<std::size_t>(j)] += v;
            }
        double best = std::numeric_limits<double>::infinity();
        int sel_i = -1, sel_j = -1;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                const double q = static_cast<double>(m - 2) *
                                     cd[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                                 r[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(j)];
                if (q < best) {
                    best = q;
                    sel_i = i;
                    sel_j = j;
                }
            }
        const Cluster a = cs[static_cast<std::size_t>(sel_i)];
        const Cluster b = cs[static_cast<std::size_t>(sel_j)];

        // Node-level selection: the chosen clusters' nodes count individually,
        // every other cluster still contributes its averaged distance.
        const int m_hat = m + a.size() + b.size() - 2;
        auto node_sum = [&](int z, int other_first) {
            double sum = 0.0;
            for (int k = 0; k < m; ++k) {
                if (k == sel_i || k == sel_j)
                    continue;
                const Cluster& c = cs[static_cast<std::size_t>(k)];
                double s = 0.0;
                for (int t = 0; t < c.size(); ++t)
                    s += d(z, c.node(t));
                sum += s / static_cast<double>(c.size());
            }
            for (int t = 0; t < a.size(); ++t)
                if (a.node(t) != z)
                    sum += d(z, a.node(t));
            for (int t = 0; t < b.size(); ++t)
                if (b.node(t) != z)
                    sum += d(z, b.node(t));
            (void)other_first;
            return sum;
        };
        double best_q = std::numeric_limits<double>::infinity();
        int x = -1, y = -1;
        for (int i = 0; i < a.size(); ++i)
            for (int j = 0; j < b.size(); ++j) {
                const int cx = a.node(i);
                const int cy = b.node(j);
                const double q = static_cast<double>(m_hat - 2) * d(cx, cy) - node_sum(cx, 0) -
                                 node_sum(cy, 0);
                if (q < best_q) {
                    best_q = q;
                    x = cx;
                    y = cy;
                }
            }

        const int x_partner = nbr_[static_cast<std::size_t>(x)];
        const int y_partner = nbr_[static_cast<std::size_t>(y)];
        if (x_partner < 0 && y_partner < 0) {
            nbr_[static_cast<std::size_t>(x)] = y;
            nbr_[static_cast<std::size_t>(y)] = x;
            return;
        }
        if (x_partner >= 0 && y_partner < 0) {
            reduce3(x_partner, x, y);
            return;
        }
        if (x_partner < 0 && y_partner >= 0) {
            reduce3(x, y, y_partner);
            return;
        }
        const auto [u, v] = reduce3(x_partner, x, y);
        reduce3(u, v, y_partner);
    }

    /// Replaces the chain a - b - c by two linked nodes u (a side), v (c side).
    std::pair<int, int> reduce3(int a, int b, int c) {
        const int u = next_id_++;
        const int v = next_id_++;
        for (int z : active_) {
            if (z == a || z == b || z == c)
                continue;
            const double du = (2.0 * d(a, z) + d(b, z)) / 3.0;
            const double dv = (2.0 * d(c, z) + d(b, z)) / 3.0;
            dist_[static_cast<std::size_t>(u)][static_cast<std::size_t>(z)] = du;
            dist_[static_cast<std::size_t>(z)][static_cast<std::size_t>(u)] = du;
            dist_[static_cast<std::size_t>(v)][static_cast<std::size_t>(z)] = dv;
            dist_[static_cast<std::size_t>(z)][static_cast<std::size_t>(v)] = dv;
        }
        const double duv = (d(a, b) + d(b, c) + d(a, c)) / 3.0;
        dist_[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = duv;
        dist_[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = duv;

        auto drop = [&](int id) {
            active_.erase(std::remove(active_.begin(), active_.end(), id), active_.end());
            nbr_[static_cast<std::size_t>(id)] = -1;
        };
        drop(a);
        drop(b);
        drop(c);
        active_.push_back(u);
        active_.push_back(v);
        nbr_[static_cast<std::size_t>(u)] = v;
        nbr_[static_cast<std::size_t>(v)] = u;
        reductions_.push_back({a, b, c, u, v});
        return {u, v};
    }

    static void expand(std::vector<int>& cycle, const Reduction& red) {
        const std::size_t len = cycle.size();
        for (std::size_t i = 0; i < len; ++i) {
            const int cur = cycle[i];
            const int nxt = cycle[(i + 1) % len];
            if (cur == red.u && nxt == red.v) {
                std::vector<int> out;
                out.reserve(len + 1);
                for (std::size_t k = 0; k < len; ++k) {
                    const std::size_t p = (i + k) % len;
                    if (k == 0) {
                        out.push_back(red.a);
                        out.push_back(red.b);
                    } else if (k == 1) {
                        out.push_back(red.c);
                    } else {
                        out.push_back(cycle[p]);
                    }
                }
                cycle = std::move(out);
                return;
            }
            if (cur == red.v && nxt == red.u) {
                std::vector<int> out;
                out.reserve(len + 1);
                for (std::size_t k = 0; k < len; ++k) {
                    const std::size_t p = (i + k) % len;
                    if (k == 0) {
                        out.push_back(red.c);
                        out.push_back(red.b);
                    } else if (k == 1) {
                        out.push_back(red.a);
                    } else {
                        out.push_back(cycle[p]);
                    }
                }
                cycle = std::move(out);
                return;
            }
        }
        fail(Status::NumericFailure, "cycle expansion lost a reduced node pair");
    }

    static std::vector<int> canonicalize(std::vector<int> cycle) {
        const auto zero = std::find(cycle.begin(), cycle.end(), 0);
        std::rotate(cycle.begin(), zero, cycle.end());
        if (cycle.size() > 2 && cycle[1] > cycle[cycle.size() - 1])
            std::reverse(cycle.begin() + 1, cycle.end());
        return cycle;
    }

    int n_;
    int next_id_;
    std::vector<std::vector<double>> dist_;
    std::vector<int> nbr_;
    std::vector<int> active_;
    std::vector<Reduction> reductions_;
};

// ---------------------------------------------------------------------------
// Split weights for a fixed circular order.
//
// The splits compatible with a cycle x_0..x_{n-1} are the arcs {x_a..x_b},
// 1 <= a <= b <= n-1. The linear system mapping arc weights to pairwise
// distances is square and invertible with the closed-form solution
//   w(a,b) = (d(a-1,b) + d(a,b+1) - d(a-1,b+1) - d(a,b)) / 2
// (indices are cycle positions mod n). Negative entries are resolved by
// active-set NNLS whose matrix products use 2-D prefix sums, so a matvec is
// O(n^2) instead of O(n^4).
// ---------------------------------------------------------------------------

class CircularSystem {
public:
    CircularSystem(int n, std::vector<double> position_dist)
        : n_(n), d_(std::move(position_dist)) {}

    int arc_count() const { return n_ * (n_ - 1) / 2; }

    // Arc (a, b), 1 <= a <= b <= n-1, flattened.
    int arc_index(int a, int b) const { return (a - 1) * (2 * n_ - a - 2) / 2 + (b - a); }

    double dist(int p, int q) const {
        if (p == q)
            return 0.0;
        if (p > q)
            std::swap(p, q);
        return d_[static_cast<std::size_t>(
            DistanceMatrix::condensed_index(static_cast<std::size_t>(n_),
                                            static_cast<std::size_t>(p),
                                            static_cast<std::size_t>(q)))];
    }

    std::vector<double> closed_form() const {
        std::vector<double> w(static_cast<std::size_t>(arc_count()), 0.0);
        for (int a = 1; a <= n_ - 1; ++a)
            for (int b = a; b <= n_ - 1; ++b) {
                const int bp = (b + 1) % n_;
                const double v = 0.5 * (dist(a - 1, b) + dist(a, bp) - dist(a - 1, bp) -
                                        dist(a, b));
                w[static_cast<std::size_t>(arc_index(a, b))] = v;
            }
        return w;
    }

    /// Distances induced by arc weights (A w), as a position-pair condensed vector.
    std::vector<double> apply(const std::vector<double>& w) const {
        // Prefix table over the (a, b) grid.
        std::vector<std::vector<double>> pre(static_cast<std::size_t>(n_ + 1),
                                             std::vector<double>(static_cast<std::size_t>(n_ + 1), 0.0));
        for (int a = 1; a <= n_ - 1; ++a)
            for (int b = 1; b <= n_ - 1; ++b) {
                const double val = b >= a ? w[static_cast<std::size_t>(arc_index(a, b))] : 0.0;
                pre[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    val + pre[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b)] +
                    pre[static_cast<std::size_t>(a)][static_cast<std::size_t>(b - 1)] -
                    pre[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)];
            }
        auto rect = [&](int a1, int a2, int b1, int b2) { // inclusive ranges, 1-based
            if (a1 > a2 || b1 > b2)
                return 0.0;
            return pre[static_cast<std::size_t>(a2)][static_cast<std::size_t>(b2)] -
                   pre[static_cast<std::size_t>(a1 - 1)][static_cast<std::size_t>(b2)] -
                   pre[static_cast<std::size_t>(a2)][static_cast<std::size_t>(b1 - 1)] +
                   pre[static_cast<std::size_t>(a1 - 1)][static_cast<std::size_t>(b1 - 1)];
        };
        std::vector<double> out(static_cast<std::size_t>(arc_count()), 0.0);
        for (int p = 0; p < n_; ++p)
            for (int q = p + 1; q < n_; ++q) {
                const double v = rect(1, p, p, q - 1) + rect(p + 1, q, q, n_ - 1);
                out[DistanceMatrix::condensed_index(static_cast<std::size_t>(n_),
                                                    static_cast<std::size_t>(p),
                                                    static_cast<std::size_t>(q))] = v;
            }
        return out;
    }

    /// A^T r for a position-pair condensed residual vector.
    std::vector<double> apply_transpose(const std::vector<double>& r) const {
        // Prefix table over the symmetric (p, q) matrix of residuals.
        std::vector<std::vector<double>> pre(static_cast<std::size_t>(n_ + 1),
                                             std::vector<double>(static_cast<std::size_t>(n_ + 1), 0.0));
        for (int p = 0; p < n_; ++p)
            for (int q = 0; q < n_; ++q) {
                double val = 0.0;
                if (p != q)
                    val = r[DistanceMatrix::condensed_index(
                        static_cast<std::size_t>(n_), static_cast<std::size_t>(std::min(p, q)),
                        static_cast<std::size_t>(std::max(p, q)))];
                pre[static_cast<std::size_t>(p + 1)][static_cast<std::size_t>(q + 1)] =
                    val + pre[static_cast<std::size_t>(p)][static_cast<std::size_t>(q + 1)] +
                    pre[static_cast<std::size_t>(p + 1)][static_cast<std::size_t>(q)] -
                    pre[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
            }
        auto rect = [&](int p1, int p2, int q1, int q2) { // inclusive, 0-based
            if (p1 > p2 || q1 > q2)
                return 0.0;
            return pre[static_cast<std::size_t>(p2 + 1)][static_cast<std::size_t>(q2 + 1)] -
                   pre[static_cast<std::size_t>(p1)][static_cast<std::size_t>(q2 + 1)] -
                   pre[static_cast<std::size_t>(p2 + 1)][static_cast<std::size_t>(q1)] +
                   pre[static_cast<std::size_t>(p1)][static_cast<std::size_t>(q1)];
        };
        std::vector<double> out(static_cast<std::size_t>(arc_count()), 0.0);
        for (int a = 1; a <= n_ - 1; ++a)
            for (int b = a; b <= n_ - 1; ++b)
                out[static_cast<std::size_t>(arc_index(a, b))] =
                    rect(0, a - 1, a, b) + rect(a, b, b + 1, n_ - 1);
        return out;
    }

private:
    int n_;
    std::vector<double> d_; // condensed distances between cycle positions
};

struct NnlsOutcome {
    std::vector<double> weights;
    bool converged = true;
    double residual2 = 0.0;
};

/// Lawson-Hanson active-set NNLS with a conjugate-gradient inner solver over
/// the structured system, warm-started from the positive part of the exact
/// unconstrained solution.
NnlsOutcome nnls_circular(const CircularSystem& sys, const std::vector<double>& target,
                          const std::vector<double>& warm, const NeighborNetOptions& options) {
    const int m = sys.arc_count();
    const double scale = std::max(1e-12, *std::max_element(target.begin(), target.end()));
    const double kkt_tol = options.kkt_tolerance * scale;

    std::vector<char> passive(static_cast<std::size_t>(m), 0);
    std::vector<double> x(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i)
        if (warm[static_cast<std::size_t>(i)] > 0.0)
            passive[static_cast<std::size_t>(i)] = 1;

    // CG over normal equations restricted to the passive set.
    auto solve_passive = [&](std::vector<double>& z) {
        std::fill(z.begin(), z.end(), 0.0);
        for (int i = 0; i < m; ++i)
            if (passive[static_cast<std::size_t>(i)] && x[static_cast<std::size_t>(i)] > 0.0)
                z[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
        std::vector<double> rhs = sys.apply_transpose(target);
        std::vector<double> az = sys.apply(z);
        std::vector<double> atz = sys.apply_transpose(az);
        std::vector<double> res(static_cast<std::size_t>(m), 0.0);
        double rr = 0.0;
        for (int i = 0; i < m; ++i) {
            if (!passive[static_cast<std::size_t>(i)])
                continue;
            res[static_cast<std::size_t>(i)] =
                rhs[static_cast<std::size_t>(i)] - atz[static_cast<std::size_t>(i)];
            rr += res[static_cast<std::size_t>(i)] * res[static_cast<std::size_t>(i)];
        }
        std::vector<double> p = res;
        const double rr0 = rr;
        const int cg_cap = 2 * m + 100;
        for (int iter = 0; iter < cg_cap && rr > 1e-24 * std::max(1.0, rr0); ++iter) {
            std::vector<double> ap = sys.apply(p);
            std::vector<double> atap = sys.apply_transpose(ap);
            double pap = 0.0;
            for (int i = 0; i < m; ++i)
                if (passive[static_cast<std::size_t>(i)])
                    pap += p[static_cast<std::size_t>(i)] * atap[static_cast<std::size_t>(i)];
            if (pap <= 0.0)
                break;
            const double alpha = rr / pap;
            double rr_new = 0.0;
            for (int i = 0; i < m; ++i) {
                if (!passive[static_cast<std::size_t>(i)])
                    continue;
                z[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
                res[static_cast<std::size_t>(i)] -= alpha * atap[static_cast<std::size_t>(i)];
                rr_new += res[static_cast<std::size_t>(i)] * res[static_cast<std::size_t>(i)];
            }
            const double beta = rr_new / rr;
            rr = rr_new;
            for (int i = 0; i < m; ++i) {
                if (!passive[static_cast<std::size_t>(i)])
                    continue;
                p[static_cast<std::size_t>(i)] =
                    res[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
            }
        }
    };

    std::vector<double> z(static_cast<std::size_t>(m), 0.0);
    bool need_solve = true;
    int iterations = 0;
    bool converged = false;
    while (iterations++ < options.max_iterations) {
        if (need_solve) {
            solve_passive(z);
            // Feasibility step: pull x toward z, dropping variables that hit zero.
            bool infeasible = false;
            double alpha = 1.0;
            for (int i = 0; i < m; ++i) {
                if (!passive[static_cast<std::size_t>(i)])
                    continue;
                if (z[static_cast<std::size_t>(i)] <= 0.0) {
                    infeasible = true;
                    const double xi = x[static_cast<std::size_t>(i)];
                    const double zi = z[static_cast<std::size_t>(i)];
                    if (xi - zi > 0.0)
                        alpha = std::min(alpha, xi / (xi - zi));
                }
            }
            if (infeasible) {
                for (int i = 0; i < m; ++i) {
                    if (!passive[static_cast<std::size_t>(i)])
                        continue;
                    double& xi = x[static_cast<std::size_t>(i)];
                    xi += alpha * (z[static_cast<std::size_t>(i)] - xi);
                    if (xi <= 1e-15 * scale || z[static_cast<std::size_t>(i)] <= 0.0) {
                        if (xi <= 1e-15 * scale) {
                            xi = 0.0;
                            passive[static_cast<std::size_t>(i)] = 0;
                        }
                    }
                }
                // At least one variable must leave the passive set, or we loop.
                bool removed = false;
                for (int i = 0; i < m; ++i)
                    if (passive[static_cast<std::size_t>(i)] &&
                        x[static_cast<std::size_t>(i)] == 0.0) {
                        passive[static_cast<std::size_t>(i)] = 0;
                        removed = true;
                    }
                if (!removed) {
                    // Numerical corner: force out the most negative z.
                    int worst = -1;
                    double worst_v = 0.0;
                    for (int i = 0; i < m; ++i)
                        if (passive[static_cast<std::size_t>(i)] &&
                            z[static_cast<std::size_t>(i)] < worst_v) {
                            worst_v = z[static_cast<std::size_t>(i)];
                            worst = i;
                        }
                    if (worst >= 0) {
                        passive[static_cast<std::size_t>(worst)] = 0;
                        x[static_cast<std::size_t>(worst)] = 0.0;
                    }
                }
                continue; // re-solve on the reduced passive set
            }
            for (int i = 0; i < m; ++i)
                x[static_cast<std::size_t>(i)] =
                    passive[static_cast<std::size_t>(i)] ? z[static_cast<std::size_t>(i)] : 0.0;
        }

        // KKT check: gradient on the active (zero) set must not be positive.
        std::vector<double> ax = sys.apply(x);
        std::vector<double> resid(target.size());
        for (std::size_t i = 0; i < target.size(); ++i)
            resid[i] = target[i] - ax[i];
        std::vector<double> grad = sys.apply_transpose(resid);
        int best = -1;
        double best_g = kkt_tol;
        for (int i = 0; i < m; ++i)
            if (!passive[static_cast<std::size_t>(i)] && grad[static_cast<std::size_t>(i)] > best_g) {
                best_g = grad[static_cast<std::size_t>(i)];
                best = i;
            }
        if (best < 0) {
            converged = true;
            break;
        }
        passive[static_cast<std::size_t>(best)] = 1;
        need_solve = true;
    }

    NnlsOutcome out;
    out.weights = std::move(x);
    out.converged = converged;
    std::vector<double> ax = sys.apply(out.weights);
    double r2 = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double e = target[i] - ax[i];
        r2 += e * e;
    }
    out.residual2 = r2;
    return out;
}

} // namespace

DistanceMatrix SplitSystem::induced_metric() const {
    DistanceMatrix m(taxa, DistanceKind::Embedding);
    const std::size_t n = taxa.size();
    std::vector<char> side(n, 0);
    for (const Split& s : splits) {
        std::fill(side.begin(), side.end(), 0);
        for (int t : s.side)
            side[static_cast<std::size_t>(t)] = 1;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (side[i] != side[j])
                    m.set(i, j, m.at(i, j) + s.weight);
    }
    return m;
}

void SplitSystem::validate() const {
    const std::size_t n = taxa.size();
    require(circular_order.size() == n, Status::NumericFailure, "cycle size mismatch");
    std::vector<int> pos(n, -1);
    for (std::size_t p = 0; p < n; ++p) {
        const int t = circular_order[p];
        require(t >= 0 && static_cast<std::size_t>(t) < n && pos[static_cast<std::size_t>(t)] < 0,
                Status::NumericFailure, "cycle is not a permutation");
        pos[static_cast<std::size_t>(t)] = static_cast<int>(p);
    }
    for (const Split& s : splits) {
        require(!s.side.empty() && s.side.size() < n, Status::NumericFailure,
                "split side must be a proper non-empty subset");
        require(s.weight >= 0.0, Status::NumericFailure, "negative split weight");
        // Contiguity in the circular order.
        std::vector<int> positions;
        positions.reserve(s.side.size());
        for (int t : s.side)
            positions.push_back(pos[static_cast<std::size_t>(t)]);
        std::sort(positions.begin(), positions.end());
        const bool contiguous = positions.back() - positions.front() ==
                                static_cast<int>(positions.size()) - 1;
        require(contiguous && positions.front() >= 1, Status::NumericFailure,
                "split is not contiguous in the circular order");
    }
}

SplitSystem neighbor_net(const DistanceMatrix& input, const NeighborNetOptions& options) {
    input.validate();
    const std::size_t n = input.size();
    require(n >= 1, Status::InsufficientData, "empty distance matrix");

    SplitSystem system;
    system.taxa = input.labels;
    if (n == 1) {
        system.circular_order = {0};
        return system;
    }

    CycleBuilder builder(input);
    system.circular_order = builder.build();

    // Distances indexed by cycle position.
    std::vector<double> pos_dist(n * (n - 1) / 2, 0.0);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q)
            pos_dist[DistanceMatrix::condensed_index(n, p, q)] =
                input.at(static_cast<std::size_t>(system.circular_order[p]),
                         static_cast<std::size_t>(system.circular_order[q]));

    CircularSystem sys(static_cast<int>(n), pos_dist);
    std::vector<double> weights = sys.closed_form();

    const double max_d = std::max(1e-12, *std::max_element(pos_dist.begin(), pos_dist.end()));
    const double neg_tol = 1e-11 * max_d;
    bool has_negative = false;
    for (double w : weights)
        if (w < -neg_tol) {
            has_negative = true;
            break;
        }

    double residual2 = 0.0;
    if (!has_negative) {
        for (double& w : weights)
            w = std::max(0.0, w);
        std::vector<double> ax = sys.apply(weights);
        for (std::size_t i = 0; i < pos_dist.size(); ++i) {
            const double e = pos_dist[i] - ax[i];
            residual2 += e * e;
        }
        system.nnls_converged = true;
    } else {
        NnlsOutcome outcome = nnls_circular(sys, pos_dist, weights, options);
        if (!outcome.converged && !options.allow_stalled)
            fail(Status::NnlsStalled, "split-weight NNLS hit the iteration cap at " +
                                          std::to_string(options.max_iterations) +
                                          " iterations (best-so-far available via allow_stalled)");
        weights = std::move(outcome.weights);
        residual2 = outcome.residual2;
        system.nnls_converged = outcome.converged;
    }
    system.fit_residual2 = residual2;

    for (int a = 1; a <= static_cast<int>(n) - 1; ++a)
        for (int b = a; b <= static_cast<int>(n) - 1; ++b) {
            const double w = weights[static_cast<std::size_t>(sys.arc_index(a, b))];
            if (w < options.min_weight)
                continue;
            Split split;
            split.weight = w;
            split.side.reserve(static_cast<std::size_t>(b - a + 1));
            for (int p = a; p <= b; ++p)
                split.side.push_back(system.circular_order[static_cast<std::size_t>(p)]);
            std::sort(split.side.begin(), split.side.end());
            system.splits.push_back(std::move(split));
        }
    return system;
}

} // namespace glem
