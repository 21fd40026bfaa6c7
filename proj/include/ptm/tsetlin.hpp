#pragma once

#include <cstdint>
#include <vector>

#include "ptm/bitvector.hpp"
#include "ptm/dataset.hpp"
#include "ptm/rand.hpp"

namespace ptm {

/// Reward reinforces an automaton's current decision (moves away from the
/// include/exclude boundary, saturating at 1 and N); Penalty moves one step
/// toward — and across — the boundary.
enum class Action { Reward, Penalty };

/// Clauses with no included literal evaluate as 1 while training (so feedback
/// can grow them) but 0 at inference (they carry no information).
enum class EvalMode { Training, Inference };

/// One automaton step. States live in [1, N] with N even; the decision is
/// "include" iff state > N/2.
int transition(int state, int num_states, Action action);

namespace detail {
// Directional helpers used by the feedback hot paths. promote_state moves one
// step toward the include end (min(state+1, N)), demote_state toward the
// exclude end (max(state-1, 1)); both are compositions of transition() —
// which one depends on the side of the boundary — and the unit tests pin that
// equivalence.
inline int promote_state(int state, int num_states) {
    return state < num_states ? state + 1 : state;
}
inline int demote_state(int state, int /*num_states*/) {
    return state > 1 ? state - 1 : state;
}
} // namespace detail

/// A conjunction over included literals. Literal l < F is feature bit l
/// (satisfied when the bit is 1); literal F + l is its negation (satisfied
/// when bit l is 0), so there are 2F automata per clause. Include masks are
/// cached as two BitVectors and kept in sync with the automaton states, which
/// makes evaluation pure word-wise mask arithmetic.
class Clause {
public:
    Clause(int num_features, int num_states, int polarity);

    int polarity() const { return polarity_; }
    int num_features() const { return features_; }
    int num_literals() const { return 2 * features_; }
    int num_states() const { return states_n_; }
    int included_count() const { return included_count_; }

    int state(int literal) const;
    void set_state(int literal, int value);

    bool includes(int literal) const;
    const BitVector& include_mask_pos() const { return include_pos_; }
    const BitVector& include_mask_neg() const { return include_neg_; }

    /// 1 iff every included literal is satisfied by the input. An empty
    /// clause follows the EvalMode convention above.
    int evaluate(const BitVector& input, EvalMode mode) const;

    /// Single-step moves (one toward include, one toward exclude) that keep
    /// the cached masks and included_count consistent with the state array.
    /// These are the only mutations the feedback rules perform.
    void promote(int literal);
    void demote(int literal);

private:
    int features_ = 0;
    int states_n_ = 0;
    int polarity_ = 1;
    int included_count_ = 0;
    std::vector<std::int16_t> states_;
    BitVector include_pos_;
    BitVector include_neg_;
};

/// Stochastic pattern reinforcement. Evaluates the clause in training mode;
/// on output 1 every satisfied literal is promoted with probability
/// (s-1)/s and every unsatisfied literal demoted with probability 1/s; on
/// output 0 every literal is demoted with probability 1/s.
void type_i_feedback(Clause& clause, const BitVector& input, double specificity,
                     Rng& rng);

/// Deterministic false-positive suppression. Only acts when the clause
/// evaluates to 1 in training mode: every *excluded* literal whose value is 0
/// on this input moves one step toward include; everything else is untouched.
void type_ii_feedback(Clause& clause, const BitVector& input);

/// Hyperparameters of one multi-class machine. The defaults for threshold,
/// specificity, and states are implementation choices recorded in every
/// report; they are configurable, not ground truth.
struct TmParams {
    int clauses_per_class = 200; // even: clauses come in +1/-1 pairs
    int threshold = 25;          // T: vote clamp used by the feedback gate
    double specificity = 10.0;   // s
    int states = 256;            // N: automaton states, even
    int epochs = 30;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Per-training-run counters. clause_updates counts clauses *processed* by
/// the feedback step — for every datapoint that is the target class's bank
/// plus one sampled negative class's bank — which is the deterministic,
/// hardware-independent cost metric used throughout.
struct TrainStats {
    unsigned long long clause_updates = 0;
    int epochs_run = 0;
    bool early_stopped = false;
    double train_seconds = 0.0;
};

/// Multi-class Tsetlin Machine: one clause bank per class, half of each
/// bank's clauses voting +1 and half -1. Prediction is the argmax of class
/// sums (lowest class index on ties).
class TsetlinMachine {
public:
    TsetlinMachine(int num_classes, int width, const TmParams& params);

    int num_classes() const { return classes_; }
    int width() const { return width_; }
    const TmParams& params() const { return params_; }

    const Clause& clause(int class_index, int clause_index) const;
    Clause& clause_mut(int class_index, int clause_index);

    /// Inference-mode vote total for one class.
    int class_sum(int class_index, const BitVector& input) const;
    std::vector<int> class_sums(const BitVector& input) const;
    int predict(const BitVector& input) const;

    /// Feedback for one labeled point; returns the clauses processed (always
    /// two banks' worth).
    unsigned long long train_point(const BitVector& input, int label);

    /// One pass over the dataset in a freshly shuffled order.
    unsigned long long train_epoch(const BinaryDataset& data);

    /// Runs up to `epochs` epochs; when stop_data is given, evaluation runs
    /// after every epoch and training halts early at 100% accuracy on it.
    /// Wall time covers the whole loop including those checks.
    TrainStats train(const BinaryDataset& data, int epochs,
                     const BinaryDataset* stop_data = nullptr);

    double accuracy(const BinaryDataset& data) const;

private:
    int training_class_sum(int class_index, const BitVector& input,
                           std::vector<std::uint8_t>& outputs) const;
    bool gate(int clamped_sum_offset) const; // offset in [0, 2T], probability offset/2T
    void feedback_bank(int class_index, const BitVector& input, bool as_target);

    int classes_ = 0;
    int width_ = 0;
    TmParams params_;
    mutable Rng rng_;
    std::uint64_t promote_threshold_ = 0; // (s-1)/s as a 64-bit scale
    std::uint64_t demote_threshold_ = 0;  // 1/s as a 64-bit scale
    std::vector<std::vector<Clause>> banks_;
    std::vector<std::uint8_t> scratch_outputs_;
};

} // namespace ptm
