#include "volvar/lstm.hpp"

#include "volvar/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace volvar {

namespace {

GateParams gate_zeros(int in, int hid) {
    return {Eigen::MatrixXd::Zero(hid, in), Eigen::MatrixXd::Zero(hid, hid), Eigen::VectorXd::Zero(hid)};
}

template <typename Params, typename Fn>
void for_each_block(Params& p, Fn&& fn) {
    for (auto* g : {&p.input_gate, &p.forget_gate, &p.candidate, &p.output_gate}) {
        fn(g->input.data(), g->input.size());
        fn(g->recurrent.data(), g->recurrent.size());
        fn(g->bias.data(), g->bias.size());
    }
    fn(p.head.data(), p.head.size());
    fn(&p.head_bias, Eigen::Index{1});
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& a) {
    return a.unaryExpr([](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
    });
}

Eigen::VectorXd tanh_vec(const Eigen::VectorXd& a) {
    return a.unaryExpr([](double v) { return std::tanh(v); });
}

void check_dims(const LstmParams& p, const Eigen::VectorXd& x, const LstmState& s) {
    if (x.size() != p.input_size) {
        fail(ErrorCode::DimensionMismatch,
             "input has " + std::to_string(x.size()) + " entries, expected " + std::to_string(p.input_size));
    }
    if (s.h.size() != p.hidden_size || s.c.size() != p.hidden_size) {
        fail(ErrorCode::DimensionMismatch, "state size does not match hidden_size");
    }
}

void check_params(const LstmParams& p) {
    const auto in = p.input_size, hid = p.hidden_size;
    for (const auto* g : {&p.input_gate, &p.forget_gate, &p.candidate, &p.output_gate}) {
        if (g->input.rows() != hid || g->input.cols() != in || g->recurrent.rows() != hid ||
            g->recurrent.cols() != hid || g->bias.size() != hid) {
            fail(ErrorCode::DimensionMismatch, "gate weights inconsistent with input/hidden sizes");
        }
    }
    if (p.head.size() != hid) fail(ErrorCode::DimensionMismatch, "output head size mismatch");
}

// Everything the backward pass needs from one step.
struct StepCache {
    Eigen::VectorXd x, h_prev, c_prev;
    Eigen::VectorXd i, f, g, o, c, tanh_c;
};

StepCache step(const LstmParams& p, const Eigen::VectorXd& x, const LstmState& s) {
    StepCache k;
    k.x = x;
    k.h_prev = s.h;
    k.c_prev = s.c;
    auto pre = [&](const GateParams& g) -> Eigen::VectorXd { return g.input * x + g.recurrent * s.h + g.bias; };
    k.i = sigmoid(pre(p.input_gate));
    k.f = sigmoid(pre(p.forget_gate));
    k.g = tanh_vec(pre(p.candidate));
    k.o = sigmoid(pre(p.output_gate));
    k.c = k.f.cwiseProduct(s.c) + k.i.cwiseProduct(k.g);
    k.tanh_c = tanh_vec(k.c);
    return k;
}

}  // namespace

LstmParams LstmParams::zeros(int input_size, int hidden_size) {
    if (input_size <= 0 || hidden_size <= 0) fail(ErrorCode::InvalidParameter, "LSTM sizes must be positive");
    LstmParams p;
    p.input_size = input_size;
    p.hidden_size = hidden_size;
    p.input_gate = gate_zeros(input_size, hidden_size);
    p.forget_gate = gate_zeros(input_size, hidden_size);
    p.candidate = gate_zeros(input_size, hidden_size);
    p.output_gate = gate_zeros(input_size, hidden_size);
    p.head = Eigen::RowVectorXd::Zero(hidden_size);
    p.head_bias = 0.0;
    return p;
}

LstmParams LstmParams::initialize(int input_size, int hidden_size, std::uint64_t seed) {
    LstmParams p = zeros(input_size, hidden_size);
    SplitRng rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
    for_each_block(p, [&](double* data, Eigen::Index n) {
        for (Eigen::Index k = 0; k < n; ++k) data[k] = (2.0 * rng.uniform() - 1.0) * bound;
    });
    p.forget_gate.bias.array() += 1.0;
    return p;
}

std::size_t LstmParams::parameter_count() const {
    const auto in = static_cast<std::size_t>(input_size), hid = static_cast<std::size_t>(hidden_size);
    return 4 * (hid * in + hid * hid + hid) + hid + 1;
}

std::vector<double> LstmParams::flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for_each_block(*this, [&](const double* data, Eigen::Index n) { out.insert(out.end(), data, data + n); });
    return out;
}

void LstmParams::assign(std::span<const double> flat) {
    if (flat.size() != parameter_count()) fail(ErrorCode::DimensionMismatch, "flat parameter vector has wrong size");
    std::size_t pos = 0;
    for_each_block(*this, [&](double* data, Eigen::Index n) {
        for (Eigen::Index k = 0; k < n; ++k) data[k] = flat[pos++];
    });
}

bool LstmParams::all_finite() const {
    bool ok = true;
    for_each_block(*this, [&](const double* data, Eigen::Index n) {
        for (Eigen::Index k = 0; k < n; ++k) ok = ok && std::isfinite(data[k]);
    });
    return ok;
}

LstmState LstmState::zeros(int hidden_size) {
    return {Eigen::VectorXd::Zero(hidden_size), Eigen::VectorXd::Zero(hidden_size)};
}

LstmState lstm_cell(const LstmParams& params, const Eigen::VectorXd& x, const LstmState& state) {
    check_params(params);
    check_dims(params, x, state);
    const StepCache k = step(params, x, state);
    return {k.o.cwiseProduct(k.tanh_c), k.c};
}

LstmOutput lstm_forward(const LstmParams& params, const InputSequence& sequence) {
    if (sequence.empty()) fail(ErrorCode::InvalidParameter, "empty input sequence");
    check_params(params);
    LstmOutput out;
    out.states.reserve(sequence.size());
    LstmState state = LstmState::zeros(params.hidden_size);
    for (const auto& x : sequence) {
        check_dims(params, x, state);
        const StepCache k = step(params, x, state);
        state = {k.o.cwiseProduct(k.tanh_c), k.c};
        out.states.push_back(state);
    }
    out.prediction = params.head.dot(state.h) + params.head_bias;
    return out;
}

LstmGradients lstm_gradients(const LstmParams& params, const InputSequence& sequence, double target) {
    if (sequence.empty()) fail(ErrorCode::InvalidParameter, "empty input sequence");
    check_params(params);

    std::vector<StepCache> caches;
    caches.reserve(sequence.size());
    LstmState state = LstmState::zeros(params.hidden_size);
    for (const auto& x : sequence) {
        check_dims(params, x, state);
        caches.push_back(step(params, x, state));
        state = {caches.back().o.cwiseProduct(caches.back().tanh_c), caches.back().c};
    }

    LstmGradients out;
    out.prediction = params.head.dot(state.h) + params.head_bias;
    const double err = out.prediction - target;
    out.loss = err * err;
    if (!std::isfinite(out.loss)) fail(ErrorCode::NonFiniteValue, "non-finite loss in forward pass");

    LstmParams& g = out.grad;
    g = LstmParams::zeros(params.input_size, params.hidden_size);
    const double d_pred = 2.0 * err;
    g.head = d_pred * state.h.transpose();
    g.head_bias = d_pred;

    Eigen::VectorXd dh = d_pred * params.head.transpose();
    Eigen::VectorXd dc = Eigen::VectorXd::Zero(params.hidden_size);

    auto accumulate = [](GateParams& grad, const GateParams& weights, const Eigen::VectorXd& da,
                         const StepCache& k, Eigen::VectorXd& dh_prev) {
        grad.input.noalias() += da * k.x.transpose();
        grad.recurrent.noalias() += da * k.h_prev.transpose();
        grad.bias += da;
        dh_prev.noalias() += weights.recurrent.transpose() * da;
    };

    for (auto it = caches.rbegin(); it != caches.rend(); ++it) {
        const StepCache& k = *it;
        const Eigen::VectorXd d_o = dh.cwiseProduct(k.tanh_c);
        dc += dh.cwiseProduct(k.o).cwiseProduct((1.0 - k.tanh_c.array().square()).matrix());

        const Eigen::VectorXd d_i = dc.cwiseProduct(k.g);
        const Eigen::VectorXd d_g = dc.cwiseProduct(k.i);
        const Eigen::VectorXd d_f = dc.cwiseProduct(k.c_prev);

        const Eigen::VectorXd da_i = (d_i.array() * k.i.array() * (1.0 - k.i.array())).matrix();
        const Eigen::VectorXd da_f = (d_f.array() * k.f.array() * (1.0 - k.f.array())).matrix();
        const Eigen::VectorXd da_g = (d_g.array() * (1.0 - k.g.array().square())).matrix();
        const Eigen::VectorXd da_o = (d_o.array() * k.o.array() * (1.0 - k.o.array())).matrix();

        Eigen::VectorXd dh_prev = Eigen::VectorXd::Zero(params.hidden_size);
        accumulate(g.input_gate, params.input_gate, da_i, k, dh_prev);
        accumulate(g.forget_gate, params.forget_gate, da_f, k, dh_prev);
        accumulate(g.candidate, params.candidate, da_g, k, dh_prev);
        accumulate(g.output_gate, params.output_gate, da_o, k, dh_prev);

        dc = dc.cwiseProduct(k.f);
        dh = std::move(dh_prev);
    }

    if (!g.all_finite()) fail(ErrorCode::NonFiniteValue, "non-finite gradient; clip or lower the learning rate");
    return out;
}

void TrainConfig::validate() const {
    if (lag < 1) fail(ErrorCode::InvalidConfig, "lstm.lag must be >= 1");
    if (hidden_size < 1) fail(ErrorCode::InvalidConfig, "lstm.hidden_size must be >= 1");
    if (!(learning_rate > 0.0)) fail(ErrorCode::InvalidConfig, "lstm.learning_rate must be > 0");
    if (max_epochs < 1) fail(ErrorCode::InvalidConfig, "lstm.max_epochs must be >= 1");
    if (patience < 1) fail(ErrorCode::InvalidConfig, "lstm.patience must be >= 1");
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) fail(ErrorCode::InvalidConfig, "lstm.val_fraction must be in (0,1)");
    if (!(grad_clip > 0.0)) fail(ErrorCode::InvalidConfig, "lstm.grad_clip must be > 0");
}

std::uint64_t SplitRng::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t SplitRng::below(std::size_t bound) { return static_cast<std::size_t>(next() % bound); }

TrainResult train_lstm(std::span<const TrainingSample> samples, const TrainConfig& config) {
    config.validate();
    if (samples.size() < static_cast<std::size_t>(config.lag) + 10) {
        fail(ErrorCode::TooFewObservations, "need at least lag + 10 training samples, got " +
                                                std::to_string(samples.size()));
    }
    const int input_size = static_cast<int>(samples.front().window.front().size());

    std::size_t n_val = static_cast<std::size_t>(
        std::llround(config.val_fraction * static_cast<double>(samples.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, samples.size() - 1);
    const std::size_t n_train = samples.size() - n_val;

    TrainResult result;
    LstmParams params = LstmParams::initialize(input_size, config.hidden_size, config.seed);
    std::vector<double> flat = params.flatten();
    SplitRng rng(config.seed ^ 0x5deece66dULL);
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);

    auto validation_loss = [&](const LstmParams& p) {
        double acc = 0.0;
        for (std::size_t s = n_train; s < samples.size(); ++s) {
            const double e = lstm_forward(p, samples[s].window).prediction - samples[s].target;
            acc += e * e;
        }
        return acc / static_cast<double>(n_val);
    };

    result.params = params;
    result.log.best_val_loss = validation_loss(params);
    int since_best = 0;
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        for (std::size_t k = n_train; k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);

        double train_acc = 0.0;
        for (std::size_t idx : order) {
            LstmGradients gr;
            try {
                gr = lstm_gradients(params, samples[idx].window, samples[idx].target);
            } catch (const Error& e) {
                fail(ErrorCode::Divergence, std::string("training diverged: ") + e.message());
            }
            train_acc += gr.loss;
            std::vector<double> grad = gr.grad.flatten();
            double norm2 = 0.0;
            for (double v : grad) norm2 += v * v;
            const double norm = std::sqrt(norm2);
            const double scale = norm > config.grad_clip ? config.grad_clip / norm : 1.0;
            for (std::size_t j = 0; j < flat.size(); ++j) flat[j] -= config.learning_rate * scale * grad[j];
            params.assign(flat);
        }
        const double train_loss = train_acc / static_cast<double>(n_train);
        const double val_loss = validation_loss(params);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
            fail(ErrorCode::Divergence, "non-finite loss at epoch " + std::to_string(epoch));
        }
        result.log.train_loss.push_back(train_loss);
        result.log.val_loss.push_back(val_loss);

        if (val_loss < result.log.best_val_loss) {
            result.log.best_val_loss = val_loss;
            result.log.best_epoch = epoch;
            result.params = params;
            since_best = 0;
        } else if (++since_best >= config.patience) {
            result.log.stopped_early = epoch + 1 < config.max_epochs;
            break;
        }
    }
    return result;
}

}  // namespace volvar
