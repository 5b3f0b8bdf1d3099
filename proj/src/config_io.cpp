#include "cascade/config_io.hpp"

#include <cmath>

namespace cascade {

using nlohmann::json;

namespace {

json parse_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
    }
}

const json& field(const json& j, const char* name) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "expected a JSON object");
    auto it = j.find(name);
    if (it == j.end()) throw Error(ErrorCode::ParseError, std::string("missing field '") + name + "'", name);
    return *it;
}

double number(const json& j, const char* name) {
    if (!j.is_number()) throw Error(ErrorCode::ParseError, std::string("'") + name + "' must be a number", name);
    return j.get<double>();
}

double number_field(const json& j, const char* name) { return number(field(j, name), name); }

double optional_number(const json& j, const char* name, double fallback) {
    auto it = j.find(name);
    return it == j.end() ? fallback : number(*it, name);
}

std::vector<double> number_list(const json& j, const char* name) {
    if (!j.is_array()) throw Error(ErrorCode::ParseError, std::string("'") + name + "' must be an array", name);
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(number(v, name));
    return out;
}

// Scalars are repeated n times; arrays are taken as-is.
std::vector<double> rates(const json& j, const char* name, std::size_t n) {
    const json& v = field(j, name);
    if (v.is_number()) return std::vector<double>(n, v.get<double>());
    return number_list(v, name);
}

}  // namespace

Cascade cascade_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "cascade config must be a JSON object");
    std::size_t n = 0;
    if (auto it = j.find("n"); it != j.end()) {
        if (!it->is_number_integer() || it->get<long long>() < 1) {
            throw Error(ErrorCode::ParseError, "'n' must be a positive integer", "n");
        }
        n = it->get<std::size_t>();
    } else if (auto a = j.find("alpha"); a != j.end() && a->is_array()) {
        n = a->size();
    } else {
        throw Error(ErrorCode::ParseError, "missing field 'n'", "n");
    }
    Cascade c;
    c.n = n;
    c.alpha = rates(j, "alpha", n);
    c.beta = rates(j, "beta", n);
    c.leak = number_field(j, "leak");
    c.feedback = optional_number(j, "feedback", 0.0);
    validate(c);
    return c;
}

Cascade cascade_from_json(std::string_view text) { return cascade_from_json(parse_text(text)); }

json to_json(const Cascade& c) {
    return json{{"n", c.n}, {"alpha", c.alpha}, {"beta", c.beta}, {"leak", c.leak}, {"feedback", c.feedback}};
}

std::string serialize(const Cascade& c) { return to_json(c).dump(); }

InputSignal input_from_json(const json& j) {
    const json& kind_node = field(j, "kind");
    if (!kind_node.is_string()) throw Error(ErrorCode::ParseError, "'kind' must be a string", "kind");
    const std::string kind = kind_node.get<std::string>();
    InputSignal r;
    if (kind == "impulse") {
        r = Impulse{};
    } else if (kind == "exp" || kind == "decaying_exp") {
        r = DecayingExp{number_field(j, "r0"), number_field(j, "lambda")};
    } else if (kind == "peak") {
        r = Peak{number_field(j, "r0"), number_field(j, "lambda")};
    } else if (kind == "rect") {
        r = Rect{number_field(j, "r0"), number_field(j, "t0")};
    } else if (kind == "sinc") {
        r = Sinc{number_field(j, "eps")};
    } else if (kind == "sampled") {
        r = Sampled{number_list(field(j, "times"), "times"), number_list(field(j, "values"), "values")};
    } else {
        throw Error(ErrorCode::ParseError, "unknown input kind '" + kind + "'", "kind");
    }
    validate(r);
    return r;
}

InputSignal input_from_json(std::string_view text) { return input_from_json(parse_text(text)); }

json to_json(const InputSignal& r) {
    return std::visit(
        [](const auto& in) -> json {
            using T = std::decay_t<decltype(in)>;
            if constexpr (std::is_same_v<T, Impulse>) return {{"kind", "impulse"}};
            else if constexpr (std::is_same_v<T, DecayingExp>) return {{"kind", "exp"}, {"r0", in.r0}, {"lambda", in.lambda}};
            else if constexpr (std::is_same_v<T, Peak>) return {{"kind", "peak"}, {"r0", in.r0}, {"lambda", in.lambda}};
            else if constexpr (std::is_same_v<T, Rect>) return {{"kind", "rect"}, {"r0", in.r0}, {"t0", in.t0}};
            else if constexpr (std::is_same_v<T, Sinc>) return {{"kind", "sinc"}, {"eps", in.eps}};
            else return {{"kind", "sampled"}, {"times", in.times}, {"values", in.values}};
        },
        r);
}

PerturbationSpec perturbation_from_json(const json& j) {
    const json& entries = field(j, "entries");
    if (!entries.is_array()) throw Error(ErrorCode::ParseError, "'entries' must be an array", "entries");
    PerturbationSpec spec;
    for (const auto& e : entries) {
        const double row = number_field(e, "row");
        const double col = number_field(e, "col");
        if (row < 1 || col < 1 || row != std::floor(row) || col != std::floor(col)) {
            throw Error(ErrorCode::ParseError, "perturbation row/col must be positive integers", "entries");
        }
        spec.entries.push_back(
            {static_cast<std::size_t>(row), static_cast<std::size_t>(col), number_field(e, "value")});
    }
    return spec;
}

PerturbationSpec perturbation_from_json(std::string_view text) { return perturbation_from_json(parse_text(text)); }

}  // namespace cascade
