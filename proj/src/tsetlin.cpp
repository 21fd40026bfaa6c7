#include "ptm/tsetlin.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace ptm {

int transition(int state, int num_states, Action action) {
    if (num_states < 2 || num_states % 2 != 0)
        throw ContractError("transition: N must be even and at least 2");
    if (state < 1 || state > num_states)
        throw ContractError("transition: state " + std::to_string(state) +
                            " outside [1, " + std::to_string(num_states) + "]");
    const bool include_side = state > num_states / 2;
    if (action == Action::Reward) {
        // Deeper into the current decision, saturating at the ends.
        if (include_side) return state < num_states ? state + 1 : state;
        return state > 1 ? state - 1 : state;
    }
    // Penalty: toward (and across) the boundary; never saturates because the
    // boundary is interior.
    return include_side ? state - 1 : state + 1;
}

namespace {

std::uint64_t probability_threshold(double p) {
    if (p <= 0.0) return 0;
    const double scaled = p * 18446744073709551616.0; // 2^64
    if (scaled >= 18446744073709551615.0) return UINT64_MAX;
    return static_cast<std::uint64_t>(scaled);
}

inline bool bernoulli(Rng& rng, std::uint64_t threshold) { return rng() < threshold; }

// Runs all constructor checks before any member allocates storage.
int checked_clause_features(int num_features, int num_states, int polarity) {
    if (num_features < 1) throw ContractError("Clause: need at least one feature");
    if (num_states < 2 || num_states % 2 != 0)
        throw ContractError("Clause: N must be even and at least 2");
    if (num_states > 32766)
        throw ContractError("Clause: N exceeds the 16-bit state storage");
    if (polarity != 1 && polarity != -1)
        throw ContractError("Clause: polarity must be +1 or -1");
    return num_features;
}

// Shared Type I inner loop; `output` is the clause's training-mode value on
// this input.
void type_i_apply(Clause& clause, const BitVector& input, int output,
                  std::uint64_t promote_threshold, std::uint64_t demote_threshold,
                  Rng& rng) {
    const int features = clause.num_features();
    if (output == 1) {
        for (int l = 0; l < 2 * features; ++l) {
            const bool value = l < features ? input.get(l) : !input.get(l - features);
            if (value) {
                if (bernoulli(rng, promote_threshold)) clause.promote(l);
            } else {
                if (bernoulli(rng, demote_threshold)) clause.demote(l);
            }
        }
    } else {
        for (int l = 0; l < 2 * features; ++l)
            if (bernoulli(rng, demote_threshold)) clause.demote(l);
    }
}

} // namespace

Clause::Clause(int num_features, int num_states, int polarity)
    : features_(checked_clause_features(num_features, num_states, polarity)),
      states_n_(num_states),
      polarity_(polarity),
      states_(static_cast<std::size_t>(2 * num_features),
              static_cast<std::int16_t>(num_states / 2)),
      include_pos_(num_features),
      include_neg_(num_features) {
    // All automata start at N/2: everything excluded, masks all zero.
}

int Clause::state(int literal) const {
    if (literal < 0 || literal >= num_literals())
        throw ContractError("Clause: literal index out of range");
    return states_[static_cast<std::size_t>(literal)];
}

bool Clause::includes(int literal) const { return state(literal) > states_n_ / 2; }

void Clause::set_state(int literal, int value) {
    if (literal < 0 || literal >= num_literals())
        throw ContractError("Clause: literal index out of range");
    if (value < 1 || value > states_n_)
        throw ContractError("Clause: state " + std::to_string(value) + " outside [1, " +
                            std::to_string(states_n_) + "]");
    const bool was_included = states_[static_cast<std::size_t>(literal)] > states_n_ / 2;
    const bool now_included = value > states_n_ / 2;
    states_[static_cast<std::size_t>(literal)] = static_cast<std::int16_t>(value);
    if (was_included == now_included) return;
    BitVector& mask = literal < features_ ? include_pos_ : include_neg_;
    const int bit = literal < features_ ? literal : literal - features_;
    mask.set(bit, now_included);
    included_count_ += now_included ? 1 : -1;
}

void Clause::promote(int literal) {
    std::int16_t& s = states_[static_cast<std::size_t>(literal)];
    if (s == states_n_) return;
    ++s;
    if (s == states_n_ / 2 + 1) { // crossed into include
        BitVector& mask = literal < features_ ? include_pos_ : include_neg_;
        mask.set(literal < features_ ? literal : literal - features_, true);
        ++included_count_;
    }
}

void Clause::demote(int literal) {
    std::int16_t& s = states_[static_cast<std::size_t>(literal)];
    if (s == 1) return;
    --s;
    if (s == states_n_ / 2) { // crossed into exclude
        BitVector& mask = literal < features_ ? include_pos_ : include_neg_;
        mask.set(literal < features_ ? literal : literal - features_, false);
        --included_count_;
    }
}

int Clause::evaluate(const BitVector& input, EvalMode mode) const {
    if (input.width() != features_)
        throw ContractError("Clause: input width " + std::to_string(input.width()) +
                            " != " + std::to_string(features_));
    if (included_count_ == 0) return mode == EvalMode::Training ? 1 : 0;
    const auto in = input.words();
    const auto pos = include_pos_.words();
    const auto neg = include_neg_.words();
    for (std::size_t w = 0; w < in.size(); ++w) {
        if (pos[w] & ~in[w]) return 0; // an included positive literal sees a 0
        if (neg[w] & in[w]) return 0;  // an included negated literal sees a 1
    }
    return 1;
}

void type_i_feedback(Clause& clause, const BitVector& input, double specificity,
                     Rng& rng) {
    if (!(specificity > 1.0))
        throw ContractError("type_i_feedback: specificity must exceed 1");
    const int output = clause.evaluate(input, EvalMode::Training);
    type_i_apply(clause, input, output,
                 probability_threshold((specificity - 1.0) / specificity),
                 probability_threshold(1.0 / specificity), rng);
}

void type_ii_feedback(Clause& clause, const BitVector& input) {
    if (clause.evaluate(input, EvalMode::Training) == 0) return;
    const int features = clause.num_features();
    // Candidates: excluded literals whose value is 0 on this input.
    const auto in = input.words();
    const auto pos = clause.include_mask_pos().words();
    const auto neg = clause.include_mask_neg().words();
    for (std::size_t w = 0; w < in.size(); ++w) {
        const int base = static_cast<int>(w) * 64;
        // Positive literal l has value 0 where the input bit is 0.  Padding
        // bits past the width would look like candidates, so mask them off.
        std::uint64_t cand = ~in[w] & ~pos[w];
        const int valid = features - base;
        if (valid < 64) cand &= (1ull << valid) - 1;
        while (cand) {
            const int bit = std::countr_zero(cand);
            cand &= cand - 1;
            clause.promote(base + bit);
        }
        // Negated literal l has value 0 where the input bit is 1.
        std::uint64_t candn = in[w] & ~neg[w];
        while (candn) {
            const int bit = std::countr_zero(candn);
            candn &= candn - 1;
            clause.promote(features + base + bit);
        }
    }
}

void TmParams::validate() const {
    if (clauses_per_class < 2 || clauses_per_class % 2 != 0)
        throw ConfigError("params: clauses_per_class must be even and at least 2");
    if (threshold < 1) throw ConfigError("params: threshold must be positive");
    if (!(specificity > 1.0)) throw ConfigError("params: specificity must exceed 1");
    if (states < 2 || states % 2 != 0 || states > 32766)
        throw ConfigError("params: states must be even, in [2, 32766]");
    if (epochs < 1) throw ConfigError("params: epochs must be positive");
}

TsetlinMachine::TsetlinMachine(int num_classes, int width, const TmParams& params)
    : classes_(num_classes), width_(width), params_(params), rng_(params.seed) {
    params_.validate();
    if (num_classes < 2)
        throw ContractError("machine: need at least two classes");
    if (width < 1) throw ContractError("machine: need at least one feature");
    promote_threshold_ =
        probability_threshold((params_.specificity - 1.0) / params_.specificity);
    demote_threshold_ = probability_threshold(1.0 / params_.specificity);

    banks_.reserve(static_cast<std::size_t>(classes_));
    for (int c = 0; c < classes_; ++c) {
        std::vector<Clause> bank;
        bank.reserve(static_cast<std::size_t>(params_.clauses_per_class));
        for (int j = 0; j < params_.clauses_per_class; ++j)
            bank.emplace_back(width_, params_.states, j % 2 == 0 ? 1 : -1);
        banks_.push_back(std::move(bank));
    }
    // Random initial decisions: every automaton starts on one side of the
    // boundary or the other.
    for (auto& bank : banks_)
        for (Clause& cl : bank)
            for (int l = 0; l < cl.num_literals(); ++l)
                cl.set_state(l, params_.states / 2 + static_cast<int>(rng_() & 1u));
    scratch_outputs_.resize(static_cast<std::size_t>(params_.clauses_per_class));
}

const Clause& TsetlinMachine::clause(int class_index, int clause_index) const {
    if (class_index < 0 || class_index >= classes_ || clause_index < 0 ||
        clause_index >= params_.clauses_per_class)
        throw ContractError("machine: clause index out of range");
    return banks_[static_cast<std::size_t>(class_index)]
                 [static_cast<std::size_t>(clause_index)];
}

Clause& TsetlinMachine::clause_mut(int class_index, int clause_index) {
    return const_cast<Clause&>(
        static_cast<const TsetlinMachine*>(this)->clause(class_index, clause_index));
}

int TsetlinMachine::class_sum(int class_index, const BitVector& input) const {
    if (class_index < 0 || class_index >= classes_)
        throw ContractError("machine: class index out of range");
    int sum = 0;
    for (const Clause& cl : banks_[static_cast<std::size_t>(class_index)])
        sum += cl.polarity() * cl.evaluate(input, EvalMode::Inference);
    return sum;
}

std::vector<int> TsetlinMachine::class_sums(const BitVector& input) const {
    std::vector<int> sums(static_cast<std::size_t>(classes_));
    for (int c = 0; c < classes_; ++c) sums[static_cast<std::size_t>(c)] = class_sum(c, input);
    return sums;
}

int TsetlinMachine::predict(const BitVector& input) const {
    int best = 0;
    int best_sum = class_sum(0, input);
    for (int c = 1; c < classes_; ++c) {
        const int s = class_sum(c, input);
        if (s > best_sum) { // ties keep the lowest class index
            best_sum = s;
            best = c;
        }
    }
    return best;
}

int TsetlinMachine::training_class_sum(int class_index, const BitVector& input,
                                       std::vector<std::uint8_t>& outputs) const {
    const auto& bank = banks_[static_cast<std::size_t>(class_index)];
    int sum = 0;
    for (std::size_t j = 0; j < bank.size(); ++j) {
        const int out = bank[j].evaluate(input, EvalMode::Training);
        outputs[j] = static_cast<std::uint8_t>(out);
        sum += bank[j].polarity() * out;
    }
    return sum;
}

bool TsetlinMachine::gate(int clamped_sum_offset) const {
    // Passes with probability offset / 2T, computed exactly in integers.
    using u128 = unsigned __int128;
    const std::uint64_t draw = rng_();
    const u128 lhs = static_cast<u128>(draw) * static_cast<u128>(2 * params_.threshold);
    const u128 rhs = static_cast<u128>(static_cast<std::uint64_t>(clamped_sum_offset)) << 64;
    return lhs < rhs;
}

void TsetlinMachine::feedback_bank(int class_index, const BitVector& input,
                                   bool as_target) {
    const int t = params_.threshold;
    const int cs = training_class_sum(class_index, input, scratch_outputs_);
    const int clamped = std::clamp(cs, -t, t);
    // Target banks update with probability (T - CS)/2T, sampled negative
    // banks with (T + CS)/2T; both reduce to an offset in [0, 2T].
    const int offset = as_target ? t - clamped : t + clamped;
    auto& bank = banks_[static_cast<std::size_t>(class_index)];
    for (std::size_t j = 0; j < bank.size(); ++j) {
        if (!gate(offset)) continue;
        Clause& cl = bank[j];
        const bool type_i = as_target ? cl.polarity() == 1 : cl.polarity() == -1;
        if (type_i)
            type_i_apply(cl, input, scratch_outputs_[j], promote_threshold_,
                         demote_threshold_, rng_);
        else if (scratch_outputs_[j] == 1)
            type_ii_feedback(cl, input);
    }
}

unsigned long long TsetlinMachine::train_point(const BitVector& input, int label) {
    if (label < 0 || label >= classes_)
        throw ContractError("machine: label " + std::to_string(label) + " out of range");
    if (input.width() != width_)
        throw ContractError("machine: input width mismatch");

    feedback_bank(label, input, /*as_target=*/true);

    // One uniformly sampled other class receives negative feedback.
    int other = rand_index(rng_, classes_ - 1);
    if (other >= label) ++other;
    feedback_bank(other, input, /*as_target=*/false);

    // Cost metric: clauses processed by this feedback step — two banks.
    return 2ull * static_cast<unsigned long long>(params_.clauses_per_class);
}

unsigned long long TsetlinMachine::train_epoch(const BinaryDataset& data) {
    data.validate();
    if (data.num_classes > classes_)
        throw ContractError("machine: dataset has more classes than the machine");
    if (data.width != width_) throw ContractError("machine: dataset width mismatch");
    unsigned long long updates = 0;
    const auto order = shuffled_indices(rng_, data.size());
    for (int i : order)
        updates += train_point(data.points[static_cast<std::size_t>(i)],
                               data.labels[static_cast<std::size_t>(i)]);
    return updates;
}

TrainStats TsetlinMachine::train(const BinaryDataset& data, int epochs,
                                 const BinaryDataset* stop_data) {
    if (epochs < 1) throw ContractError("machine: epochs must be positive");
    TrainStats stats;
    const auto start = std::chrono::steady_clock::now();
    for (int e = 0; e < epochs; ++e) {
        stats.clause_updates += train_epoch(data);
        stats.epochs_run = e + 1;
        if (stop_data != nullptr && accuracy(*stop_data) == 1.0) {
            stats.early_stopped = true;
            break;
        }
    }
    stats.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return stats;
}

double TsetlinMachine::accuracy(const BinaryDataset& data) const {
    data.validate();
    int correct = 0;
    for (int i = 0; i < data.size(); ++i)
        if (predict(data.points[static_cast<std::size_t>(i)]) ==
            data.labels[static_cast<std::size_t>(i)])
            ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

} // namespace ptm
