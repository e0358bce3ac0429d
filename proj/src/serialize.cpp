#include "volvar/serialize.hpp"

#include "volvar/error.hpp"

#include <string>

namespace volvar {

using nlohmann::json;

namespace {

void expect_kind(const json& j, std::string_view kind) {
    if (!j.is_object() || !j.contains("kind") || j.at("kind").get<std::string>() != kind) {
        fail(ErrorCode::InvalidParameter, "expected a '" + std::string(kind) + "' document");
    }
}

template <typename F>
auto guarded(std::string_view what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidParameter, std::string(what) + ": " + e.what());
    }
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index rows, Eigen::Index cols) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
        fail(ErrorCode::DimensionMismatch, "matrix row count mismatch");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols) fail(ErrorCode::DimensionMismatch, "matrix column count mismatch");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j, Eigen::Index size) {
    const auto values = j.get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != size) fail(ErrorCode::DimensionMismatch, "vector size mismatch");
    return Eigen::Map<const Eigen::VectorXd>(values.data(), size);
}

json gate_json(const GateParams& g) {
    return {{"input", matrix_json(g.input)}, {"recurrent", matrix_json(g.recurrent)}, {"bias", vector_json(g.bias)}};
}

GateParams gate_from(const json& j, int in, int hid) {
    return {matrix_from(j.at("input"), hid, in), matrix_from(j.at("recurrent"), hid, hid), vector_from(j.at("bias"), hid)};
}

}  // namespace

Tail parse_tail(std::string_view name) {
    if (name == "left") return Tail::Left;
    if (name == "right") return Tail::Right;
    fail(ErrorCode::InvalidParameter, "unknown tail '" + std::string(name) + "'");
}

json to_json(const TrainConfig& c) {
    return {{"lag", c.lag},       {"hidden_size", c.hidden_size},   {"learning_rate", c.learning_rate},
            {"max_epochs", c.max_epochs}, {"patience", c.patience}, {"val_fraction", c.val_fraction},
            {"seed", c.seed},     {"grad_clip", c.grad_clip}};
}

TrainConfig train_config_from_json(const json& j) {
    return guarded("train config", [&] {
        TrainConfig c;
        c.lag = j.at("lag").get<int>();
        c.hidden_size = j.at("hidden_size").get<int>();
        c.learning_rate = j.at("learning_rate").get<double>();
        c.max_epochs = j.at("max_epochs").get<int>();
        c.patience = j.at("patience").get<int>();
        c.val_fraction = j.at("val_fraction").get<double>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.grad_clip = j.at("grad_clip").get<double>();
        return c;
    });
}

json to_json(const LstmParams& p) {
    return {{"kind", "lstm_params"},
            {"input_size", p.input_size},
            {"hidden_size", p.hidden_size},
            {"input_gate", gate_json(p.input_gate)},
            {"forget_gate", gate_json(p.forget_gate)},
            {"candidate", gate_json(p.candidate)},
            {"output_gate", gate_json(p.output_gate)},
            {"head", vector_json(p.head.transpose())},
            {"head_bias", p.head_bias}};
}

LstmParams lstm_params_from_json(const json& j) {
    return guarded("lstm params", [&] {
        expect_kind(j, "lstm_params");
        const int in = j.at("input_size").get<int>(), hid = j.at("hidden_size").get<int>();
        LstmParams p = LstmParams::zeros(in, hid);
        p.input_gate = gate_from(j.at("input_gate"), in, hid);
        p.forget_gate = gate_from(j.at("forget_gate"), in, hid);
        p.candidate = gate_from(j.at("candidate"), in, hid);
        p.output_gate = gate_from(j.at("output_gate"), in, hid);
        p.head = vector_from(j.at("head"), hid).transpose();
        p.head_bias = j.at("head_bias").get<double>();
        return p;
    });
}

json to_json(const LstmForecaster& m) {
    return {{"kind", "lstm_forecaster"},
            {"model", std::string(to_string(m.kind))},
            {"params", to_json(m.params)},
            {"channel_mean", m.channel_mean},
            {"channel_scale", m.channel_scale},
            {"target_mean", m.target_mean},
            {"target_scale", m.target_scale},
            {"train_config", to_json(m.config)},
            {"best_epoch", m.log.best_epoch},
            {"best_val_loss", m.log.best_val_loss},
            {"epochs_run", m.log.val_loss.size()}};
}

LstmForecaster lstm_forecaster_from_json(const json& j) {
    return guarded("lstm forecaster", [&] {
        expect_kind(j, "lstm_forecaster");
        LstmForecaster m;
        m.kind = parse_vol_model(j.at("model").get<std::string>());
        m.params = lstm_params_from_json(j.at("params"));
        m.channel_mean = j.at("channel_mean").get<std::vector<double>>();
        m.channel_scale = j.at("channel_scale").get<std::vector<double>>();
        m.target_mean = j.at("target_mean").get<double>();
        m.target_scale = j.at("target_scale").get<double>();
        m.config = train_config_from_json(j.at("train_config"));
        m.log.best_epoch = j.at("best_epoch").get<int>();
        m.log.best_val_loss = j.at("best_val_loss").get<double>();
        if (m.channel_mean.size() != static_cast<std::size_t>(m.params.input_size) ||
            m.channel_scale.size() != m.channel_mean.size()) {
            fail(ErrorCode::DimensionMismatch, "scaler size does not match LSTM input size");
        }
        return m;
    });
}

json to_json(const HarCoefficients& c) {
    json j{{"kind", "har"},         {"variant", std::string(to_string(c.variant))},
           {"beta0", c.beta0},      {"beta_d", c.beta_d},
           {"beta_w", c.beta_w},    {"beta_m", c.beta_m}};
    if (c.beta_dq) j["beta_dq"] = *c.beta_dq;
    if (c.beta_wq) j["beta_wq"] = *c.beta_wq;
    if (c.beta_mq) j["beta_mq"] = *c.beta_mq;
    return j;
}

HarCoefficients har_from_json(const json& j) {
    return guarded("har", [&] {
        expect_kind(j, "har");
        HarCoefficients c;
        const auto v = j.at("variant").get<std::string>();
        c.variant = v == "HAR" ? HarVariant::Har : v == "HARQ" ? HarVariant::Harq : v == "HARQF" ? HarVariant::Harqf
                  : throw Error(ErrorCode::InvalidParameter, "unknown HAR variant " + v);
        c.beta0 = j.at("beta0").get<double>();
        c.beta_d = j.at("beta_d").get<double>();
        c.beta_w = j.at("beta_w").get<double>();
        c.beta_m = j.at("beta_m").get<double>();
        if (j.contains("beta_dq")) c.beta_dq = j.at("beta_dq").get<double>();
        if (j.contains("beta_wq")) c.beta_wq = j.at("beta_wq").get<double>();
        if (j.contains("beta_mq")) c.beta_mq = j.at("beta_mq").get<double>();
        c.validate();
        return c;
    });
}

json to_json(const ArfimaParams& p) {
    return {{"kind", "arfima"}, {"d", p.d},           {"ar", p.ar},     {"ma", p.ma},
            {"intercept", p.intercept}, {"mean", p.mean}, {"sigma2", p.sigma2}, {"aic", p.aic},
            {"truncation", p.truncation}};
}

ArfimaParams arfima_from_json(const json& j) {
    return guarded("arfima", [&] {
        expect_kind(j, "arfima");
        ArfimaParams p;
        p.d = j.at("d").get<double>();
        p.ar = j.at("ar").get<std::vector<double>>();
        p.ma = j.at("ma").get<std::vector<double>>();
        p.intercept = j.at("intercept").get<double>();
        p.mean = j.at("mean").get<double>();
        p.sigma2 = j.at("sigma2").get<double>();
        p.aic = j.at("aic").get<double>();
        p.truncation = j.at("truncation").get<std::size_t>();
        return p;
    });
}

json to_json(const GpdFit& f) {
    return {{"kind", "gpd"}, {"xi", f.xi},   {"beta", f.beta}, {"u", f.u},
            {"n", f.n},      {"n_u", f.n_u}, {"tail", std::string(to_string(f.tail))}};
}

GpdFit gpd_from_json(const json& j) {
    return guarded("gpd", [&] {
        expect_kind(j, "gpd");
        GpdFit f;
        f.xi = j.at("xi").get<double>();
        f.beta = j.at("beta").get<double>();
        f.u = j.at("u").get<double>();
        f.n = j.at("n").get<std::size_t>();
        f.n_u = j.at("n_u").get<std::size_t>();
        f.tail = parse_tail(j.at("tail").get<std::string>());
        if (!(f.beta > 0.0) || f.n_u == 0 || f.n_u > f.n) fail(ErrorCode::InvalidParameter, "invalid GPD fit");
        return f;
    });
}

json to_json(const SkstFit& f) {
    return {{"kind", "skewed_t"}, {"nu", f.nu},       {"gamma", f.gamma},
            {"loc", f.loc},       {"scale", f.scale}, {"log_likelihood", f.log_likelihood}};
}

SkstFit skst_from_json(const json& j) {
    return guarded("skewed_t", [&] {
        expect_kind(j, "skewed_t");
        SkstFit f{j.at("nu").get<double>(), j.at("gamma").get<double>(), j.at("loc").get<double>(),
                  j.at("scale").get<double>(), j.at("log_likelihood").get<double>()};
        f.validate();
        return f;
    });
}

json to_json(const EmpiricalTail& t) {
    return {{"kind", "empirical"}, {"tail", std::string(to_string(t.tail))}, {"sorted", t.sorted}};
}

EmpiricalTail empirical_from_json(const json& j) {
    return guarded("empirical", [&] {
        expect_kind(j, "empirical");
        return EmpiricalTail::from_sample(j.at("sorted").get<std::vector<double>>(),
                                          parse_tail(j.at("tail").get<std::string>()));
    });
}

json to_json(const TailModel& m) {
    json fit = std::visit([](const auto& f) { return to_json(f); }, m.fit);
    return {{"kind", "tail_model"},
            {"method", std::string(to_string(m.method))},
            {"tail", std::string(to_string(m.tail))},
            {"fallback", m.fallback},
            {"fit", std::move(fit)}};
}

TailModel tail_model_from_json(const json& j) {
    return guarded("tail model", [&] {
        expect_kind(j, "tail_model");
        TailModel m;
        m.method = parse_quantile_method(j.at("method").get<std::string>());
        m.tail = parse_tail(j.at("tail").get<std::string>());
        m.fallback = j.at("fallback").get<bool>();
        const auto& fit = j.at("fit");
        const auto kind = fit.at("kind").get<std::string>();
        if (kind == "gpd") m.fit = gpd_from_json(fit);
        else if (kind == "skewed_t") m.fit = skst_from_json(fit);
        else if (kind == "empirical") m.fit = empirical_from_json(fit);
        else fail(ErrorCode::InvalidParameter, "unknown tail fit kind " + kind);
        return m;
    });
}

}  // namespace volvar
