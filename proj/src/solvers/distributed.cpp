#include "swingsafe/errors.hpp"
#include "swingsafe/kernels.hpp"
#include "swingsafe/solvers.hpp"
#include "swingsafe/detail/span.hpp"

#include "saddle_driver.hpp"

#include <map>
#include <tuple>

namespace swingsafe {

std::vector<AgentPlan> make_agents(const QpInstance& qp) {
    check_dimensions(qp);
    std::vector<AgentPlan> agents(qp.n_agents());
    for (int a = 0; a < qp.n_agents(); ++a) agents[a].id = a;
    for (int j = 0; j < qp.dim(); ++j) agents[qp.owner[j]].primal.push_back(j);
    for (int r = 0; r < qp.n_ineq(); ++r) agents[qp.ineq_owner[r]].ineq.push_back(r);
    for (int r = 0; r < qp.n_eq(); ++r) agents[qp.eq_owner[r]].eq.push_back(r);
    return agents;
}

namespace {

enum Slot { kZ = 0, kEta = 1, kMu = 2 };

struct Subscription {
    Slot slot;
    int index;
};

// Private state of one agent: its copies of remote values and what it
// fetches from whom each round.
struct Agent {
    const AgentPlan* plan = nullptr;
    std::vector<Subscription> primal_reads, dual_reads;
    Eigen::VectorXd z, eta, mu; // local views, only subscribed entries are meaningful
    Eigen::VectorXd own_z, own_g, own_eta, own_r1, own_mu, own_r2;
};

// Owner lookup per slot built from the agent plans. Throws OwnershipGap.
std::vector<int> ownership(int size, const std::vector<AgentPlan>& agents,
                           std::vector<int> AgentPlan::*field, const char* what) {
    std::vector<int> owner(size, -1);
    for (const AgentPlan& a : agents) {
        for (int idx : a.*field) {
            if (idx < 0 || idx >= size)
                throw OwnershipGap(std::string(what) + " index " + std::to_string(idx) +
                                   " out of range in agent " + std::to_string(a.id));
            if (owner[idx] != -1)
                throw OwnershipGap(std::string(what) + " " + std::to_string(idx) +
                                   " is owned by agents " + std::to_string(owner[idx]) + " and " +
                                   std::to_string(a.id));
            owner[idx] = a.id;
        }
    }
    for (int i = 0; i < size; ++i)
        if (owner[i] == -1)
            throw OwnershipGap(std::string(what) + " " + std::to_string(i) + " has no owner");
    return owner;
}

} // namespace

DistributedResult distributed_execute(const QpInstance& qp, const std::vector<AgentPlan>& plans,
                                      const SaddleState& start, const SaddleOptions& opts,
                                      const Eigen::VectorXd* oracle) {
    check_dimensions(qp);
    if (start.z.size() != qp.dim() || start.eta.size() != qp.n_ineq() ||
        start.mu.size() != qp.n_eq())
        throw DimensionMismatch("saddle state does not match the program");
    if ((start.eta.array() < 0.0).any()) throw PreconditionError("inequality multipliers must be >= 0");
    for (const AgentPlan& a : plans)
        if (a.id < 0 || a.id >= qp.n_agents())
            throw OwnershipGap("agent id " + std::to_string(a.id) + " is not a node or edge");
    const std::vector<int> var_owner = ownership(qp.dim(), plans, &AgentPlan::primal, "variable");
    const std::vector<int> ineq_owner = ownership(qp.n_ineq(), plans, &AgentPlan::ineq, "inequality row");
    const std::vector<int> eq_owner = ownership(qp.n_eq(), plans, &AgentPlan::eq, "equality row");
    auto owner_of = [&](Slot s, int idx) {
        return s == kZ ? var_owner[idx] : s == kEta ? ineq_owner[idx] : eq_owner[idx];
    };

    const AgentGraph graph(qp);
    const SaddleOperator op(qp);
    std::map<std::tuple<int, int, int>, MessageRecord> records;

    // Subscriptions: what each agent must read to update what it owns.
    std::vector<Agent> agents(plans.size());
    for (std::size_t k = 0; k < plans.size(); ++k) {
        Agent& ag = agents[k];
        ag.plan = &plans[k];
        const int self = plans[k].id;
        auto subscribe = [&](std::vector<Subscription>& list, Slot slot, int idx, ReadKind kind,
                             int limit, std::vector<char>& seen) {
            const std::size_t key = static_cast<std::size_t>(slot) * (qp.dim() + qp.n_ineq() + qp.n_eq()) + idx;
            if (seen[key]) return;
            seen[key] = 1;
            list.push_back({slot, idx});
            const int writer = owner_of(slot, idx);
            const int d = graph.distance(self, writer);
            if (d > limit)
                throw LocalityViolation("agent " + std::to_string(self) + " would read from agent " +
                                            std::to_string(writer) + " at distance " +
                                            std::to_string(d),
                                        -1);
            if (writer == self) return;
            MessageRecord& rec = records[{self, writer, static_cast<int>(kind)}];
            rec.reader = self;
            rec.writer = writer;
            rec.kind = kind;
            rec.distance = d;
            ++rec.values_per_round;
        };
        const std::size_t total = 3u * (qp.dim() + qp.n_ineq() + qp.n_eq());
        std::vector<char> seen_p(total, 0), seen_d(total, 0);
        for (int j : plans[k].primal) {
            for (SparseMatrix::InnerIterator it(qp.H, j); it; ++it)
                subscribe(ag.primal_reads, kZ, static_cast<int>(it.col()), ReadKind::Primal, 2, seen_p);
            for (SparseMatrix::InnerIterator it(op.R1t, j); it; ++it)
                subscribe(ag.primal_reads, kEta, static_cast<int>(it.col()), ReadKind::Primal, 2, seen_p);
            for (SparseMatrix::InnerIterator it(op.R2t, j); it; ++it)
                subscribe(ag.primal_reads, kMu, static_cast<int>(it.col()), ReadKind::Primal, 2, seen_p);
        }
        for (int r : plans[k].ineq) {
            subscribe(ag.dual_reads, kEta, r, ReadKind::Dual, 1, seen_d);
            for (SparseMatrix::InnerIterator it(qp.R1, r); it; ++it)
                subscribe(ag.dual_reads, kZ, static_cast<int>(it.col()), ReadKind::Dual, 1, seen_d);
        }
        for (int r : plans[k].eq)
            for (SparseMatrix::InnerIterator it(qp.R2, r); it; ++it)
                subscribe(ag.dual_reads, kZ, static_cast<int>(it.col()), ReadKind::Dual, 1, seen_d);

        ag.z = Eigen::VectorXd::Zero(qp.dim());
        ag.eta = Eigen::VectorXd::Zero(qp.n_ineq());
        ag.mu = Eigen::VectorXd::Zero(qp.n_eq());
        ag.own_z.resize(plans[k].primal.size());
        ag.own_g.resize(plans[k].primal.size());
        ag.own_eta.resize(plans[k].ineq.size());
        ag.own_r1.resize(plans[k].ineq.size());
        ag.own_mu.resize(plans[k].eq.size());
        ag.own_r2.resize(plans[k].eq.size());
    }

    const double h = effective_step(qp, opts);
    const double cz = h / opts.gains.primal, ce = h / opts.gains.ineq, cm = h / opts.gains.eq;

    // `s` is the union of the agents' owned entries as published at the
    // start of a round; agents read it only through their subscriptions.
    auto round = [&](SaddleState& s, Eigen::VectorXd& g) {
        for (Agent& ag : agents) {
            for (const auto* list : {&ag.primal_reads, &ag.dual_reads})
                for (const Subscription& sub : *list) {
                    switch (sub.slot) {
                    case kZ: ag.z[sub.index] = s.z[sub.index]; break;
                    case kEta: ag.eta[sub.index] = s.eta[sub.index]; break;
                    case kMu: ag.mu[sub.index] = s.mu[sub.index]; break;
                    }
                }
            const AgentPlan& p = *ag.plan;
            for (std::size_t i = 0; i < p.primal.size(); ++i) {
                ag.own_z[i] = s.z[p.primal[i]];
                ag.own_g[i] = op.gradient_entry(p.primal[i], ag.z.data(), ag.eta.data(), ag.mu.data());
            }
            for (std::size_t i = 0; i < p.ineq.size(); ++i) {
                ag.own_eta[i] = s.eta[p.ineq[i]];
                ag.own_r1[i] = op.ineq_entry(p.ineq[i], ag.z.data());
            }
            for (std::size_t i = 0; i < p.eq.size(); ++i) {
                ag.own_mu[i] = s.mu[p.eq[i]];
                ag.own_r2[i] = op.eq_entry(p.eq[i], ag.z.data());
            }
        }
        // Round barrier, then every agent updates and republishes its entries.
        for (Agent& ag : agents) {
            const AgentPlan& p = *ag.plan;
            kernels::primal_step(detail::span_of(ag.own_z), detail::span_of(ag.own_g), cz);
            kernels::dual_ineq_step(detail::span_of(ag.own_eta), detail::span_of(ag.own_r1), ce);
            kernels::dual_eq_step(detail::span_of(ag.own_mu), detail::span_of(ag.own_r2), cm);
            for (std::size_t i = 0; i < p.primal.size(); ++i) {
                s.z[p.primal[i]] = ag.own_z[i];
                g[p.primal[i]] = ag.own_g[i];
            }
            for (std::size_t i = 0; i < p.ineq.size(); ++i) s.eta[p.ineq[i]] = ag.own_eta[i];
            for (std::size_t i = 0; i < p.eq.size(); ++i) s.mu[p.eq[i]] = ag.own_mu[i];
        }
    };

    DistributedResult out;
    out.result = detail::run_saddle(qp, start, opts, oracle, h, round);
    out.log.rounds = out.result.rounds;
    for (auto& [key, rec] : records) {
        rec.first_round = 1;
        rec.last_round = out.result.rounds;
        if (rec.kind == ReadKind::Primal)
            out.log.max_primal_distance = std::max(out.log.max_primal_distance, rec.distance);
        else
            out.log.max_dual_distance = std::max(out.log.max_dual_distance, rec.distance);
        out.log.records.push_back(rec);
    }
    return out;
}

} // namespace swingsafe
