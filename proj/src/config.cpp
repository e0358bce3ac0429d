#include "volvar/config.hpp"

#include "volvar/artifacts.hpp"
#include "volvar/error.hpp"

#include <fstream>
#include <set>

namespace volvar {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) fail(ErrorCode::InvalidConfig, std::string(section) + " must be an object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) {
            fail(ErrorCode::InvalidConfig,
                 "unknown key '" + key + "'" + (section.empty() ? "" : " in section '" + std::string(section) + "'"));
        }
    }
}

template <class T>
void read_key(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(ErrorCode::InvalidConfig, std::string("bad value for '") + key + "'");
    }
}

Date read_date(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        fail(ErrorCode::InvalidConfig, std::string("split.") + key + " must be a YYYY-MM-DD string");
    }
    try {
        return parse_date(j.at(key).get<std::string>());
    } catch (const Error& e) {
        fail(ErrorCode::InvalidConfig, std::string("split.") + key + ": " + e.message());
    }
}

}  // namespace

void RunConfig::validate() const {
    if (!(p0 > 0.0 && p0 <= 0.1)) fail(ErrorCode::InvalidConfig, "p0 must lie in (0, 0.1]");
    if (refit_cadence < 1) fail(ErrorCode::InvalidConfig, "refit_cadence must be positive");
    if (data_path.empty()) fail(ErrorCode::InvalidConfig, "data_path must not be empty");
    if (output_dir.empty()) fail(ErrorCode::InvalidConfig, "output_dir must not be empty");
    if (volatility_models.empty()) fail(ErrorCode::InvalidConfig, "models.volatility must not be empty");
    if (quantile_methods.empty()) fail(ErrorCode::InvalidConfig, "models.quantile must not be empty");
    if (split && !(split->train_end < split->val_end && split->val_end < split->test_end)) {
        fail(ErrorCode::InvalidConfig, "split dates must satisfy train_end < val_end < test_end");
    }
    if (arfima.max_p < 0 || arfima.max_q < 0 || arfima.truncation < 1) {
        fail(ErrorCode::InvalidConfig, "arfima orders must be non-negative and truncation positive");
    }
    lstm.validate();
}

std::vector<ModelSpec> RunConfig::specs() const {
    std::vector<ModelSpec> out;
    for (VolModel v : volatility_models) {
        for (QuantileMethod q : quantile_methods) out.push_back({v, q, p0, source});
    }
    return out;
}

RollingConfig RunConfig::rolling() const {
    RollingConfig r;
    r.lstm = lstm;
    r.lstm.seed = seed;
    r.refit_cadence = refit_cadence;
    r.arfima = arfima;
    return r;
}

nlohmann::json RunConfig::canonical() const {
    json j;
    j["data_path"] = data_path;
    j["seed"] = seed;
    j["p0"] = p0;
    j["refit_cadence"] = refit_cadence;
    if (split) {
        j["split"] = {{"train_end", format_date(split->train_end)},
                      {"val_end", format_date(split->val_end)},
                      {"test_end", format_date(split->test_end)}};
    }
    json vol = json::array();
    for (VolModel v : volatility_models) vol.push_back(std::string(to_string(v)));
    json q = json::array();
    for (QuantileMethod m : quantile_methods) q.push_back(std::string(to_string(m)));
    j["models"] = {{"volatility", vol}, {"quantile", q}, {"source", std::string(to_string(source))}};
    j["lstm"] = {{"lag", lstm.lag},
                 {"hidden_size", lstm.hidden_size},
                 {"learning_rate", lstm.learning_rate},
                 {"max_epochs", lstm.max_epochs},
                 {"patience", lstm.patience},
                 {"val_fraction", lstm.val_fraction},
                 {"grad_clip", lstm.grad_clip}};
    j["arfima"] = {{"max_p", arfima.max_p}, {"max_q", arfima.max_q}, {"truncation", arfima.truncation}};
    return j;
}

std::string RunConfig::hash() const { return sha256_hex(canonical().dump()); }

RunConfig config_from_json(const nlohmann::json& j) {
    reject_unknown(j, "",
                   {"data_path", "output_dir", "seed", "p0", "refit_cadence", "split", "models", "lstm", "arfima"});
    RunConfig c;
    read_key(j, "data_path", c.data_path);
    read_key(j, "output_dir", c.output_dir);
    read_key(j, "seed", c.seed);
    read_key(j, "p0", c.p0);
    read_key(j, "refit_cadence", c.refit_cadence);
    if (j.contains("split")) {
        const auto& s = j.at("split");
        reject_unknown(s, "split", {"train_end", "val_end", "test_end"});
        c.split = Split{read_date(s, "train_end"), read_date(s, "val_end"), read_date(s, "test_end")};
    }
    if (j.contains("models")) {
        const auto& m = j.at("models");
        reject_unknown(m, "models", {"volatility", "quantile", "source"});
        try {
            if (m.contains("volatility")) {
                c.volatility_models.clear();
                for (const auto& v : m.at("volatility")) c.volatility_models.push_back(parse_vol_model(v.get<std::string>()));
            }
            if (m.contains("quantile")) {
                c.quantile_methods.clear();
                for (const auto& v : m.at("quantile")) c.quantile_methods.push_back(parse_quantile_method(v.get<std::string>()));
            }
            if (m.contains("source")) c.source = parse_source(m.at("source").get<std::string>());
        } catch (const json::exception&) {
            fail(ErrorCode::InvalidConfig, "models entries must be strings");
        } catch (const Error& e) {
            fail(ErrorCode::InvalidConfig, e.message());
        }
        std::set<VolModel> vs(c.volatility_models.begin(), c.volatility_models.end());
        std::set<QuantileMethod> qs(c.quantile_methods.begin(), c.quantile_methods.end());
        if (vs.size() != c.volatility_models.size() || qs.size() != c.quantile_methods.size()) {
            fail(ErrorCode::InvalidConfig, "duplicate model names");
        }
    }
    if (j.contains("lstm")) {
        const auto& l = j.at("lstm");
        reject_unknown(l, "lstm",
                       {"lag", "hidden_size", "learning_rate", "max_epochs", "patience", "val_fraction", "grad_clip"});
        read_key(l, "lag", c.lstm.lag);
        read_key(l, "hidden_size", c.lstm.hidden_size);
        read_key(l, "learning_rate", c.lstm.learning_rate);
        read_key(l, "max_epochs", c.lstm.max_epochs);
        read_key(l, "patience", c.lstm.patience);
        read_key(l, "val_fraction", c.lstm.val_fraction);
        read_key(l, "grad_clip", c.lstm.grad_clip);
    }
    if (j.contains("arfima")) {
        const auto& a = j.at("arfima");
        reject_unknown(a, "arfima", {"max_p", "max_q", "truncation"});
        read_key(a, "max_p", c.arfima.max_p);
        read_key(a, "max_q", c.arfima.max_q);
        read_key(a, "truncation", c.arfima.truncation);
    }
    c.lstm.seed = c.seed;
    try {
        c.validate();
    } catch (const Error& e) {
        fail(ErrorCode::InvalidConfig, e.message());
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::InvalidConfig, "cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::InvalidConfig, std::string("config parse error: ") + e.what());
    }
    return config_from_json(j);
}

Split effective_split(const RunConfig& config, const std::vector<Date>& dates) {
    if (config.split) return *config.split;
    if (dates.size() < 10) fail(ErrorCode::InvalidSplit, "too few days for the default split");
    const std::size_t n = dates.size();
    return {dates[n / 2 - 1], dates[n * 7 / 10 - 1], dates[n - 1]};
}

}  // namespace volvar
