#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace volvar {

// Weights feeding one gate: pre-activation = input * x + recurrent * h + bias.
struct GateParams {
    Eigen::MatrixXd input;      // hidden x input
    Eigen::MatrixXd recurrent;  // hidden x hidden
    Eigen::VectorXd bias;       // hidden
};

// Single-layer LSTM with a linear head mapping the final hidden state to a
// scalar forecast.
struct LstmParams {
    int input_size = 0;
    int hidden_size = 0;
    GateParams input_gate;
    GateParams forget_gate;
    GateParams candidate;
    GateParams output_gate;
    Eigen::RowVectorXd head;  // 1 x hidden
    double head_bias = 0.0;

    static LstmParams zeros(int input_size, int hidden_size);
    // uniform(-1/sqrt(hidden), 1/sqrt(hidden)) per matrix, forget-gate bias +1.
    static LstmParams initialize(int input_size, int hidden_size, std::uint64_t seed);

    std::size_t parameter_count() const;
    // Order: gates i, f, c, o (input, recurrent, bias each, column-major), head, head_bias.
    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);
    bool all_finite() const;
};

struct LstmState {
    Eigen::VectorXd h;
    Eigen::VectorXd c;

    static LstmState zeros(int hidden_size);
};

using InputSequence = std::vector<Eigen::VectorXd>;

LstmState lstm_cell(const LstmParams& params, const Eigen::VectorXd& x, const LstmState& state);

struct LstmOutput {
    double prediction = 0.0;
    std::vector<LstmState> states;  // one per time step, after the step
};

// Runs the sequence from a zero state.
LstmOutput lstm_forward(const LstmParams& params, const InputSequence& sequence);

struct LstmGradients {
    LstmParams grad;  // same shapes as the parameters
    double loss = 0.0;
    double prediction = 0.0;
};

// BPTT gradients of (prediction - target)^2.
LstmGradients lstm_gradients(const LstmParams& params, const InputSequence& sequence, double target);

struct TrainConfig {
    int lag = 22;
    int hidden_size = 8;
    double learning_rate = 1e-2;
    int max_epochs = 100;
    int patience = 10;
    double val_fraction = 0.10;
    std::uint64_t seed = 42;
    double grad_clip = 5.0;

    void validate() const;
};

struct TrainingSample {
    InputSequence window;
    double target = 0.0;
};

struct TrainingLog {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    int best_epoch = -1;
    double best_val_loss = 0.0;
    bool stopped_early = false;
};

struct TrainResult {
    LstmParams params;
    TrainingLog log;
};

// Chronological split: the last val_fraction of the samples drive early
// stopping. Plain SGD over a seeded shuffle with global-norm gradient
// clipping; returns the parameters with the lowest validation loss.
TrainResult train_lstm(std::span<const TrainingSample> samples, const TrainConfig& config);

// Deterministic generator shared by initialization and shuffling; independent
// of the standard library's distribution implementations.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double uniform();  // [0, 1)
    std::size_t below(std::size_t bound);

private:
    std::uint64_t state_;
};

}  // namespace volvar
