//
// Project     : schedopt
// File        : bnb.cpp
// Description : interval propagation, point derivation and best-first
//               branch and bound over the model's binary structure
//

#include "schedopt/evaluator.hpp"
#include "schedopt/solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace schedopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-6;
constexpr double kPruneTol = 1e-12;
constexpr double kPeakScale = 0.005;

struct Boxes {
    std::vector<double> lb, ub;
};

Boxes boxes_from_model(const MilpModel& model) {
    Boxes b;
    b.lb.reserve(model.vars.size());
    b.ub.reserve(model.vars.size());
    for (const VarRef& v : model.vars) {
        b.lb.push_back(v.lb);
        b.ub.push_back(v.ub);
    }
    return b;
}

bool pin(Boxes& boxes, int var, double value) {
    const std::size_t j = static_cast<std::size_t>(var);
    if (value < boxes.lb[j] - kFeasTol || value > boxes.ub[j] + kFeasTol)
        return false;
    boxes.lb[j] = value;
    boxes.ub[j] = value;
    return true;
}

// Worklist interval propagation: a row is revisited only when one of its
// variables tightened since it was last processed.
class Propagator {
public:
    explicit Propagator(const MilpModel& model) : model_(model) {
        var_rows_.resize(model.vars.size());
        for (std::size_t r = 0; r < model.cons.size(); ++r)
            for (const LinTerm& term : model.cons[r].terms)
                var_rows_[static_cast<std::size_t>(term.var)].push_back(static_cast<int>(r));
        queued_.assign(model.cons.size(), 0);
    }

    bool run_full(Boxes& boxes) {
        for (std::size_t r = 0; r < model_.cons.size(); ++r)
            enqueue(static_cast<int>(r));
        return drain(boxes);
    }

    bool run_from_vars(Boxes& boxes, const std::vector<int>& vars) {
        for (int v : vars)
            for (int r : var_rows_[static_cast<std::size_t>(v)])
                enqueue(r);
        return drain(boxes);
    }

private:
    void enqueue(int row) {
        if (!queued_[static_cast<std::size_t>(row)]) {
            queued_[static_cast<std::size_t>(row)] = 1;
            worklist_.push_back(row);
        }
    }

    bool drain(Boxes& boxes) {
        while (!worklist_.empty()) {
            const int r = worklist_.back();
            worklist_.pop_back();
            queued_[static_cast<std::size_t>(r)] = 0;
            if (!propagate_row(model_.cons[static_cast<std::size_t>(r)], boxes)) {
                for (int q : worklist_)
                    queued_[static_cast<std::size_t>(q)] = 0;
                worklist_.clear();
                return false;
            }
        }
        return true;
    }

    bool tighten(int var, double coef, double limit, Boxes& boxes) {
        // coef * x <= limit
        const std::size_t j = static_cast<std::size_t>(var);
        double new_lb = boxes.lb[j];
        double new_ub = boxes.ub[j];
        if (coef > 0)
            new_ub = limit / coef;
        else
            new_lb = limit / coef;
        if (model_.vars[j].binary) {
            new_ub = std::floor(new_ub + 1e-9);
            new_lb = std::ceil(new_lb - 1e-9);
        }
        bool moved = false;
        if (new_ub < boxes.ub[j] - kPruneTol) {
            boxes.ub[j] = new_ub;
            moved = true;
        }
        if (new_lb > boxes.lb[j] + kPruneTol) {
            boxes.lb[j] = new_lb;
            moved = true;
        }
        if (moved)
            for (int r : var_rows_[j])
                enqueue(r);
        return boxes.lb[j] <= boxes.ub[j] + kFeasTol;
    }

    bool propagate_row(const Constraint& row, Boxes& boxes) {
        double min_fin = 0.0, max_fin = 0.0;
        int min_inf = 0, max_inf = 0;
        for (const LinTerm& term : row.terms) {
            const std::size_t j = static_cast<std::size_t>(term.var);
            const double lo = term.coef > 0 ? term.coef * boxes.lb[j] : term.coef * boxes.ub[j];
            const double hi = term.coef > 0 ? term.coef * boxes.ub[j] : term.coef * boxes.lb[j];
            if (lo == -kInf)
                ++min_inf;
            else
                min_fin += lo;
            if (hi == kInf)
                ++max_inf;
            else
                max_fin += hi;
        }
        if (row.sense != Sense::GE && min_inf == 0 && min_fin > row.rhs + kFeasTol)
            return false;
        if (row.sense != Sense::LE && max_inf == 0 && max_fin < row.rhs - kFeasTol)
            return false;

        for (const LinTerm& term : row.terms) {
            const std::size_t j = static_cast<std::size_t>(term.var);
            const double lo = term.coef > 0 ? term.coef * boxes.lb[j] : term.coef * boxes.ub[j];
            const double hi = term.coef > 0 ? term.coef * boxes.ub[j] : term.coef * boxes.lb[j];
            if (row.sense != Sense::GE) { // coef*x <= rhs - min(rest)
                double rest;
                if (min_inf == 0)
                    rest = min_fin - lo;
                else if (min_inf == 1 && lo == -kInf)
                    rest = min_fin;
                else
                    rest = -kInf;
                if (rest != -kInf && !tighten(term.var, term.coef, row.rhs - rest, boxes))
                    return false;
            }
            if (row.sense != Sense::LE) { // coef*x >= rhs - max(rest)
                double rest;
                if (max_inf == 0)
                    rest = max_fin - hi;
                else if (max_inf == 1 && hi == kInf)
                    rest = max_fin;
                else
                    rest = kInf;
                if (rest != kInf && !tighten(term.var, -term.coef, -(row.rhs - rest), boxes))
                    return false;
            }
        }
        return true;
    }

    const MilpModel& model_;
    std::vector<std::vector<int>> var_rows_;
    std::vector<int> worklist_;
    std::vector<char> queued_;
};

double row_value(const Constraint& row, const std::vector<double>& values) {
    double sum = 0.0;
    for (const LinTerm& term : row.terms)
        sum += term.coef * values[static_cast<std::size_t>(term.var)];
    return sum;
}

// Peak cost per scenario from the model's own lambda coefficients, so the
// reported objective is exactly the MILP objective at the point.
struct PeakCosts {
    double true_cost = 0.0;    // binary-lambda semantics, ceil(eta)^2
    double relaxed_cost = 0.0; // continuous-lambda chord
};

PeakCosts peak_costs(const MilpModel& model, const std::vector<double>& values,
                     std::vector<double>* lambda_out) {
    PeakCosts out;
    const double weight = 1.0 / static_cast<double>(model.scenario_count);
    for (int s = 0; s < model.scenario_count; ++s) {
        const std::size_t e =
            static_cast<std::size_t>(model.index.eta[static_cast<std::size_t>(s)]);
        const double eta = values[e];
        const int level = static_cast<int>(ceil_guarded(eta));
        const int k = std::min(level, model.big_m);
        if (k >= 1) {
            out.true_cost += kPeakScale * weight * static_cast<double>(k) * static_cast<double>(k);
            if (lambda_out)
                (*lambda_out)[static_cast<std::size_t>(
                    model.index
                        .lambda[static_cast<std::size_t>(s)][static_cast<std::size_t>(k) - 1])] =
                    1.0;
        }
        out.relaxed_cost += weight * lambda_chord_cost(eta, model.big_m);
    }
    return out;
}

double objective_excluding_lambda(const MilpModel& model, const std::vector<double>& values) {
    double sum = 0.0;
    for (const LinTerm& term : model.objective)
        if (model.vars[static_cast<std::size_t>(term.var)].family != VarFamily::Lambda)
            sum += term.coef * values[static_cast<std::size_t>(term.var)];
    return sum;
}

// Completes a propagated box into a concrete point: any variable still free
// is clamped toward zero (relaxed battery variables become idle), eta sits
// at its propagated lower bound, lambda is filled analytically.
DerivedPoint finish_point(const MilpModel& model, Propagator& prop, Boxes boxes,
                          bool propagation_ok) {
    DerivedPoint point;
    point.values.assign(model.vars.size(), 0.0);
    if (!propagation_ok) {
        point.violated.push_back("infeasible during propagation");
        return point;
    }
    for (std::size_t j = 0; j < model.vars.size(); ++j) {
        if (model.vars[j].family == VarFamily::Lambda ||
            model.vars[j].family == VarFamily::Eta)
            continue;
        if (boxes.ub[j] - boxes.lb[j] > kFeasTol) {
            const double value = std::clamp(0.0, boxes.lb[j], boxes.ub[j]);
            boxes.lb[j] = value;
            boxes.ub[j] = value;
            if (!prop.run_from_vars(boxes, {static_cast<int>(j)})) {
                point.violated.push_back("infeasible during completion");
                return point;
            }
        }
    }
    for (std::size_t j = 0; j < model.vars.size(); ++j)
        point.values[j] = 0.5 * (boxes.lb[j] + boxes.ub[j]);
    for (int s = 0; s < model.scenario_count; ++s) {
        const std::size_t e =
            static_cast<std::size_t>(model.index.eta[static_cast<std::size_t>(s)]);
        point.values[e] = boxes.lb[e]; // minimal peak under minimization
    }
    for (std::size_t s = 0; s < model.index.lambda.size(); ++s)
        for (int var : model.index.lambda[s])
            point.values[static_cast<std::size_t>(var)] = 0.0;

    for (const Constraint& row : model.cons) {
        bool lambda_row = false;
        for (const LinTerm& term : row.terms)
            if (model.vars[static_cast<std::size_t>(term.var)].family == VarFamily::Lambda) {
                lambda_row = true;
                break;
            }
        if (lambda_row)
            continue; // satisfied analytically by the lambda completion
        const double value = row_value(row, point.values);
        const bool bad = (row.sense == Sense::LE && value > row.rhs + kFeasTol) ||
                         (row.sense == Sense::GE && value < row.rhs - kFeasTol) ||
                         (row.sense == Sense::EQ && std::abs(value - row.rhs) > kFeasTol);
        if (bad)
            point.violated.push_back(row.name);
    }
    if (!point.violated.empty())
        return point;

    const double base = objective_excluding_lambda(model, point.values);
    const PeakCosts peaks = peak_costs(model, point.values, &point.values);
    point.objective = base + peaks.true_cost;
    point.relaxed_objective = base + peaks.relaxed_cost;
    point.feasible = true;
    return point;
}

std::vector<std::pair<int, double>> schedule_pins(const MilpModel& model,
                                                  const Schedule& schedule) {
    if (schedule.activities.size() != model.index.z.size() ||
        schedule.battery_actions.size() != model.index.x.size())
        throw std::invalid_argument("schedule shape does not match model");
    std::vector<std::pair<int, double>> pins;
    const ModelIndex& ix = model.index;
    for (std::size_t a = 0; a < ix.z.size(); ++a) {
        const ActivityDecision& dec = schedule.activities[a];
        for (const auto& [slot, var] : ix.z[a])
            pins.push_back({var, dec.scheduled && dec.start == slot ? 1.0 : 0.0});
        pins.push_back({ix.w[a], dec.scheduled ? 1.0 : 0.0});
    }
    for (std::size_t b = 0; b < ix.x.size(); ++b)
        for (std::size_t t = 0; t < ix.x[b].size(); ++t) {
            const double action = schedule.battery_actions[b][t];
            pins.push_back({ix.x[b][t], std::max(action, 0.0)});
            pins.push_back({ix.y[b][t], std::max(-action, 0.0)});
        }
    return pins;
}

} // namespace

DerivedPoint derive_point(const MilpModel& model,
                          const std::vector<std::pair<int, double>>& pins) {
    Propagator prop(model);
    Boxes boxes = boxes_from_model(model);
    for (const auto& [var, value] : pins)
        if (!pin(boxes, var, value)) {
            DerivedPoint point;
            point.values.assign(model.vars.size(), 0.0);
            point.violated.push_back("bound of " + model.vars[static_cast<std::size_t>(var)].name);
            return point;
        }
    const bool ok = prop.run_full(boxes);
    return finish_point(model, prop, std::move(boxes), ok);
}

DerivedPoint derive_point(const MilpModel& model, const Schedule& schedule) {
    return derive_point(model, schedule_pins(model, schedule));
}

Schedule schedule_from_point(const MilpModel& model, const std::vector<double>& values) {
    Schedule schedule;
    const ModelIndex& ix = model.index;
    schedule.activities.assign(ix.w.size(), ActivityDecision{});
    for (std::size_t a = 0; a < ix.z.size(); ++a)
        for (const auto& [slot, var] : ix.z[a])
            if (values[static_cast<std::size_t>(var)] > 0.5) {
                schedule.activities[a] = {true, slot};
                break;
            }
    schedule.battery_actions.assign(ix.x.size(), {});
    for (std::size_t b = 0; b < ix.x.size(); ++b) {
        schedule.battery_actions[b].assign(ix.x[b].size(), kIdle);
        for (std::size_t t = 0; t < ix.x[b].size(); ++t) {
            const double x = values[static_cast<std::size_t>(ix.x[b][t])];
            const double y = values[static_cast<std::size_t>(ix.y[b][t])];
            schedule.battery_actions[b][t] = x - y;
        }
    }
    return schedule;
}

std::string to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::Optimal:
        return "optimal";
    case SolveStatus::Feasible:
        return "feasible";
    case SolveStatus::Infeasible:
        return "infeasible";
    default:
        return "unknown";
    }
}

namespace {

struct Choice {
    std::vector<std::pair<int, double>> pins;
};

struct Group {
    std::vector<Choice> choices;
};

// Activity groups first (unscheduled option, then starts ascending), then a
// three-way idle/charge/discharge group per battery and slot. Relaxed
// battery variables are not branched; leaves complete them toward idle.
std::vector<Group> build_groups(const MilpModel& model) {
    std::vector<Group> groups;
    const ModelIndex& ix = model.index;
    for (std::size_t a = 0; a < ix.z.size(); ++a) {
        Group g;
        Choice unscheduled;
        for (const auto& [slot, var] : ix.z[a])
            unscheduled.pins.push_back({var, 0.0});
        unscheduled.pins.push_back({ix.w[a], 0.0});
        g.choices.push_back(std::move(unscheduled));
        for (const auto& [slot, var] : ix.z[a]) {
            Choice start;
            for (const auto& [other_slot, other_var] : ix.z[a])
                start.pins.push_back({other_var, other_var == var ? 1.0 : 0.0});
            start.pins.push_back({ix.w[a], 1.0});
            g.choices.push_back(std::move(start));
        }
        groups.push_back(std::move(g));
    }
    for (std::size_t b = 0; b < ix.x.size(); ++b)
        for (std::size_t t = 0; t < ix.x[b].size(); ++t) {
            const int x = ix.x[b][t];
            const int y = ix.y[b][t];
            if (!model.vars[static_cast<std::size_t>(x)].binary ||
                !model.vars[static_cast<std::size_t>(y)].binary)
                continue;
            Group g;
            g.choices.push_back({{{x, 0.0}, {y, 0.0}}});
            g.choices.push_back({{{x, 1.0}, {y, 0.0}}});
            g.choices.push_back({{{x, 0.0}, {y, 1.0}}});
            // immediately infeasible under c11; reachable only in models
            // built without the exclusion row
            g.choices.push_back({{{x, 1.0}, {y, 1.0}}});
            groups.push_back(std::move(g));
        }
    return groups;
}

struct Node {
    int parent = -1;
    int group = -1;  // group fixed by the branch leading to this node
    int choice = -1;
    int depth = 0;   // number of groups fixed
};

struct QueueEntry {
    double bound;
    long long id;
    int node;
    bool operator<(const QueueEntry& other) const {
        if (bound != other.bound)
            return bound > other.bound; // min-heap on bound
        return id > other.id;           // FIFO among equal bounds
    }
};

class BestFirstSolver {
public:
    BestFirstSolver(const MilpModel& model, const SolveLimits& limits)
        : model_(model), limits_(limits), prop_(model), groups_(build_groups(model)) {}

    SolveResult run(const std::optional<Schedule>& warm) {
        SolveResult result;
        if (warm) {
            const DerivedPoint point = derive_point(model_, *warm);
            if (!point.feasible)
                throw std::invalid_argument(
                    "warm-start schedule infeasible: " +
                    (point.violated.empty() ? std::string("?") : point.violated.front()));
            incumbent_ = schedule_from_point(model_, point.values);
            incumbent_obj_ = point.objective;
        }

        Boxes root = boxes_from_model(model_);
        if (!prop_.run_full(root)) {
            if (incumbent_) {
                result.status = SolveStatus::Feasible;
                fill(result, incumbent_obj_);
                return result;
            }
            result.status = SolveStatus::Infeasible;
            return result;
        }
        const double root_bound = bound_of(root);
        dive(root);

        nodes_.push_back({-1, -1, -1, 0});
        queue_.push({root_bound, next_id_++, 0});

        const auto start_time = std::chrono::steady_clock::now();
        bool limit_hit = false;
        while (!queue_.empty()) {
            if (explored_ >= limits_.node_limit) {
                limit_hit = true;
                break;
            }
            if (std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
                    .count() > limits_.time_limit_sec) {
                limit_hit = true;
                break;
            }
            const QueueEntry entry = queue_.top();
            if (incumbent_ && entry.bound >= incumbent_obj_ - kPruneTol)
                break; // nothing left can improve
            queue_.pop();
            ++explored_;
            expand(entry.node);
        }

        const bool exhausted =
            queue_.empty() ||
            (!limit_hit && incumbent_ && queue_.top().bound >= incumbent_obj_ - kPruneTol);
        result.nodes = explored_;
        if (incumbent_) {
            result.status = exhausted ? SolveStatus::Optimal : SolveStatus::Feasible;
            fill(result, exhausted ? incumbent_obj_
                                   : (queue_.empty() ? root_bound : queue_.top().bound));
        } else {
            result.status = exhausted ? SolveStatus::Infeasible : SolveStatus::Unknown;
            result.bound = queue_.empty() ? root_bound : queue_.top().bound;
        }
        return result;
    }

private:
    void fill(SolveResult& result, double lower_bound) {
        result.schedule = incumbent_;
        result.objective = incumbent_obj_;
        result.bound = std::min(lower_bound, incumbent_obj_);
        result.gap = (incumbent_obj_ - result.bound) / std::max(1.0, std::abs(incumbent_obj_));
    }

    // Objective bound over the boxes; the lambda block enters through the
    // continuous chord at eta's lower bound.
    double bound_of(const Boxes& boxes) const {
        double sum = 0.0;
        for (const LinTerm& term : model_.objective) {
            const std::size_t j = static_cast<std::size_t>(term.var);
            if (model_.vars[j].family == VarFamily::Lambda)
                continue;
            sum += term.coef > 0 ? term.coef * boxes.lb[j] : term.coef * boxes.ub[j];
        }
        const double weight = 1.0 / static_cast<double>(model_.scenario_count);
        for (int s = 0; s < model_.scenario_count; ++s) {
            const std::size_t e =
                static_cast<std::size_t>(model_.index.eta[static_cast<std::size_t>(s)]);
            sum += weight * lambda_chord_cost(boxes.lb[e], model_.big_m);
        }
        return sum;
    }

    Boxes replay(int node) const {
        std::vector<int> path;
        for (int n = node; n >= 0; n = nodes_[static_cast<std::size_t>(n)].parent)
            path.push_back(n);
        Boxes boxes = boxes_from_model(model_);
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            const Node& n = nodes_[static_cast<std::size_t>(*it)];
            if (n.group < 0)
                continue;
            for (const auto& [var, value] : groups_[static_cast<std::size_t>(n.group)]
                                                .choices[static_cast<std::size_t>(n.choice)]
                                                .pins)
                pin(boxes, var, value);
        }
        return boxes;
    }

    void expand(int node_id) {
        const Node node = nodes_[static_cast<std::size_t>(node_id)];
        Boxes boxes = replay(node_id);
        if (!prop_.run_full(boxes))
            return;
        if (node.depth == static_cast<int>(groups_.size())) {
            offer_leaf(finish_point(model_, prop_, std::move(boxes), true));
            return;
        }
        const Group& group = groups_[static_cast<std::size_t>(node.depth)];
        for (std::size_t c = 0; c < group.choices.size(); ++c) {
            Boxes child = boxes;
            if (!apply_choice(group.choices[c], child))
                continue;
            const double child_bound = bound_of(child);
            if (incumbent_ && child_bound >= incumbent_obj_ - kPruneTol)
                continue;
            nodes_.push_back({node_id, node.depth, static_cast<int>(c), node.depth + 1});
            queue_.push({child_bound, next_id_++, static_cast<int>(nodes_.size()) - 1});
        }
    }

    bool apply_choice(const Choice& choice, Boxes& boxes) {
        std::vector<int> touched;
        touched.reserve(choice.pins.size());
        for (const auto& [var, value] : choice.pins) {
            if (!pin(boxes, var, value))
                return false;
            touched.push_back(var);
        }
        return prop_.run_from_vars(boxes, touched);
    }

    // Greedy depth probe that seeds the incumbent so best-first search can
    // prune cost plateaus from the start.
    void dive(const Boxes& root) {
        Boxes boxes = root;
        for (const Group& group : groups_) {
            bool advanced = false;
            for (const Choice& choice : group.choices) {
                Boxes next = boxes;
                if (apply_choice(choice, next)) {
                    boxes = std::move(next);
                    advanced = true;
                    break;
                }
            }
            if (!advanced)
                return;
        }
        offer_leaf(finish_point(model_, prop_, std::move(boxes), true));
    }

    void offer_leaf(const DerivedPoint& point) {
        if (!point.feasible)
            return;
        Schedule schedule = schedule_from_point(model_, point.values);
        const bool better =
            !incumbent_ || point.objective < incumbent_obj_ - kPruneTol ||
            (std::abs(point.objective - incumbent_obj_) <= kPruneTol &&
             schedule.lex_less(*incumbent_));
        if (better) {
            incumbent_ = std::move(schedule);
            incumbent_obj_ = point.objective;
        }
    }

    const MilpModel& model_;
    SolveLimits limits_;
    Propagator prop_;
    std::vector<Group> groups_;
    std::vector<Node> nodes_;
    std::priority_queue<QueueEntry> queue_;
    std::optional<Schedule> incumbent_;
    double incumbent_obj_ = kInf;
    long long next_id_ = 0;
    long long explored_ = 0;
};

} // namespace

SolveResult branch_and_bound(const MilpModel& model, const SolveLimits& limits,
                             const std::optional<Schedule>& warm_start) {
    return BestFirstSolver(model, limits).run(warm_start);
}

} // namespace schedopt
