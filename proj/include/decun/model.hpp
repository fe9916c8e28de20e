#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "decun/filter_bank.hpp"
#include "decun/schedule.hpp"

namespace decun {

/// Per-layer effective parameters D^l = D_bar + xi_l E^l and
/// beta_l = beta_bar + gamma_l.
struct LayerParams {
    FilterBank filters;
    double beta = 0.0;
};

/// The full trainable parameter set of the unrolled network, plus the fixed
/// hyperparameters (mu, schedule, layer count).
struct DecunModel {
    FilterBank d_bar;
    std::vector<FilterBank> e_banks; // one bank per layer
    double beta_bar = 50.0;
    double mu = 5.0e4;
    ScheduleSpec schedule;
    int layers = 0;
    int filters = 0;
    double e_norm_bound = 10.0;

    void validate() const {
        schedule.validate();
        if (layers < 1) throw ParameterError("DecunModel: layers must be >= 1");
        if (filters < 1) throw ParameterError("DecunModel: filters must be >= 1");
        if (!(beta_bar > 0.0)) throw ParameterError("DecunModel: beta_bar must be > 0");
        if (!(mu > 0.0)) throw ParameterError("DecunModel: mu must be > 0");
        if (!(e_norm_bound > 0.0)) throw ParameterError("DecunModel: e_norm_bound must be > 0");
        if (d_bar.count != filters) throw DimensionError("DecunModel: d_bar filter count mismatch");
        if (static_cast<int>(e_banks.size()) != layers)
            throw DimensionError("DecunModel: expected one E bank per layer");
        for (const auto& bank : e_banks) {
            if (!bank.same_shape(d_bar)) throw DimensionError("DecunModel: E bank shape differs from d_bar");
            for (int i = 0; i < bank.count; ++i)
                if (bank.frobenius_norm(i) > e_norm_bound + 1e-12)
                    throw ParameterError("DecunModel: E bank norm exceeds bound " + std::to_string(e_norm_bound));
        }
        for (int l = 1; l <= layers; ++l) {
            const double beta_l = beta_bar + schedule.evaluate(l, beta_bar).gamma;
            if (!(beta_l > 0.0))
                throw ParameterError("DecunModel: nonpositive effective beta at layer " + std::to_string(l));
        }
    }

    /// Trainable scalar count: (C*L + C) * footprint + 1.
    int parameter_count() const {
        const int footprint = d_bar.height * d_bar.width;
        return (filters * layers + filters) * footprint + 1;
    }

    LayerParams layer_params(int l) const {
        if (l < 1 || l > layers)
            throw ParameterError("DecunModel: layer index " + std::to_string(l) + " out of range [1, " +
                                 std::to_string(layers) + "]");
        const ScheduleCoeffs c = schedule.evaluate(l, beta_bar);
        LayerParams out;
        out.filters = bank_add_scaled(d_bar, c.xi, e_banks[static_cast<std::size_t>(l - 1)]);
        out.beta = beta_bar + c.gamma;
        if (!(out.beta > 0.0))
            throw ParameterError("DecunModel: nonpositive effective beta at layer " + std::to_string(l));
        return out;
    }
};

/// Zero-initialized model with the analytic gradient pair as d_bar; the
/// classic-HQS starting point for training.
inline DecunModel make_decun_model(int layers, int filter_count, const ScheduleSpec& schedule,
                                   double beta_bar = 50.0, double mu = 5.0e4, int footprint_h = 3,
                                   int footprint_w = 3) {
    DecunModel model;
    model.layers = layers;
    model.filters = filter_count;
    model.schedule = schedule;
    model.beta_bar = beta_bar;
    model.mu = mu;
    model.d_bar = FilterBank(filter_count, footprint_h, footprint_w);
    if (filter_count == 2 && footprint_h >= 2 && footprint_w >= 2) {
        model.d_bar = make_gradient_pair(footprint_h, footprint_w);
    } else {
        // Embed forward differences into the first two filters when possible.
        const int cr = footprint_h / 2, cc = footprint_w / 2;
        if (footprint_w >= 2) {
            model.d_bar.at(0, cr, cc) = -1.0;
            model.d_bar.at(0, cr, cc + 1) = 1.0;
        }
        if (filter_count >= 2 && footprint_h >= 2) {
            model.d_bar.at(1, cr, cc) = -1.0;
            model.d_bar.at(1, cr + 1, cc) = 1.0;
        }
    }
    model.e_banks.assign(static_cast<std::size_t>(layers), FilterBank(filter_count, footprint_h, footprint_w));
    model.validate();
    return model;
}

namespace detail {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "decun-model";

inline nlohmann::ordered_json bank_to_json(const FilterBank& bank) {
    nlohmann::ordered_json filters = nlohmann::ordered_json::array();
    for (int i = 0; i < bank.count; ++i) {
        nlohmann::ordered_json taps = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < bank.filter_size(); ++k) taps.push_back(bank.filter(i)[k]);
        filters.push_back(std::move(taps));
    }
    return filters;
}

inline FilterBank bank_from_json(const nlohmann::ordered_json& j, int count, int h, int w) {
    FilterBank bank(count, h, w);
    if (!j.is_array() || static_cast<int>(j.size()) != count)
        throw FormatError("model file: malformed filter bank");
    for (int i = 0; i < count; ++i) {
        const auto& taps = j[static_cast<std::size_t>(i)];
        if (!taps.is_array() || taps.size() != bank.filter_size())
            throw FormatError("model file: filter tap count mismatch");
        for (std::size_t k = 0; k < bank.filter_size(); ++k)
            bank.filter(i)[k] = taps[k].get<double>();
    }
    return bank;
}

inline nlohmann::ordered_json schedule_to_json(const ScheduleSpec& s) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(s.kind);
    switch (s.kind) {
        case ScheduleKind::exponential:
            j["xi"] = s.xi;
            j["gamma"] = s.gamma;
            break;
        case ScheduleKind::p_series:
            j["p"] = s.p;
            break;
        case ScheduleKind::gaussian_random:
            j["seed"] = s.seed;
            j["divisor"] = s.divisor;
            break;
        case ScheduleKind::zero:
            break;
    }
    return j;
}

inline ScheduleSpec schedule_from_json(const nlohmann::ordered_json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return ScheduleSpec::zero();
    if (kind == "exponential")
        return ScheduleSpec::exponential(j.at("xi").get<double>(), j.at("gamma").get<double>());
    if (kind == "p_series") return ScheduleSpec::p_series(j.at("p").get<double>());
    if (kind == "gaussian_random")
        return ScheduleSpec::gaussian_random(j.at("seed").get<std::uint64_t>(), j.at("divisor").get<double>());
    throw FormatError("model file: unknown schedule kind '" + kind + "'");
}

} // namespace detail

inline nlohmann::ordered_json model_to_json(const DecunModel& model) {
    nlohmann::ordered_json j;
    j["format"] = detail::kModelFormatName;
    j["version"] = detail::kModelFormatVersion;
    j["layers"] = model.layers;
    j["filters"] = model.filters;
    j["footprint"] = {model.d_bar.height, model.d_bar.width};
    j["mu"] = model.mu;
    j["beta_bar"] = model.beta_bar;
    j["e_norm_bound"] = model.e_norm_bound;
    j["schedule"] = detail::schedule_to_json(model.schedule);
    j["d_bar"] = detail::bank_to_json(model.d_bar);
    nlohmann::ordered_json banks = nlohmann::ordered_json::array();
    for (const auto& bank : model.e_banks) banks.push_back(detail::bank_to_json(bank));
    j["e_banks"] = std::move(banks);
    return j;
}

inline DecunModel model_from_json(const nlohmann::ordered_json& j) {
    if (!j.contains("format") || j.at("format").get<std::string>() != detail::kModelFormatName)
        throw FormatError("model file: missing or wrong format tag");
    if (j.at("version").get<int>() != detail::kModelFormatVersion)
        throw FormatError("model file: unsupported version " + std::to_string(j.at("version").get<int>()));
    DecunModel model;
    model.layers = j.at("layers").get<int>();
    model.filters = j.at("filters").get<int>();
    const auto& fp = j.at("footprint");
    const int fh = fp.at(0).get<int>(), fw = fp.at(1).get<int>();
    model.mu = j.at("mu").get<double>();
    model.beta_bar = j.at("beta_bar").get<double>();
    model.e_norm_bound = j.at("e_norm_bound").get<double>();
    model.schedule = detail::schedule_from_json(j.at("schedule"));
    model.d_bar = detail::bank_from_json(j.at("d_bar"), model.filters, fh, fw);
    const auto& banks = j.at("e_banks");
    if (!banks.is_array() || static_cast<int>(banks.size()) != model.layers)
        throw FormatError("model file: expected one E bank per layer");
    for (const auto& bank : banks)
        model.e_banks.push_back(detail::bank_from_json(bank, model.filters, fh, fw));
    model.validate();
    return model;
}

/// Versioned JSON model file; doubles round-trip bit-exactly.
inline void save_model(const DecunModel& model, const std::string& path) {
    model.validate();
    std::ofstream out(path);
    if (!out) throw IoError("save_model: cannot open " + path);
    out << model_to_json(model).dump(2) << "\n";
    if (!out) throw IoError("save_model: write failed for " + path);
}

inline DecunModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_model: cannot open " + path);
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("load_model: malformed model file " + path + ": " + e.what());
    }
    try {
        return model_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("load_model: malformed model file " + path + ": " + e.what());
    }
}

} // namespace decun
