#include "slspec/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace slspec {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << text;
    if (!out) throw std::invalid_argument("write failed: " + path);
}

}  // namespace

Potential potential_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("potential file: bad JSON: ") +
                                    e.what());
    }
    if (!j.contains("values") || !j["values"].is_array())
        throw std::invalid_argument("potential file: missing \"values\" array");
    std::vector<double> v = j["values"].get<std::vector<double>>();
    if (j.contains("M")) {
        int M = j["M"].get<int>();
        if (M + 1 != int(v.size()))
            throw std::invalid_argument(
                "potential file: M does not match values length");
    }
    bool sym = j.value("symmetric", false);
    return Potential(std::move(v), sym);
}

std::string potential_to_json_text(const Potential& q) {
    json j;
    j["M"] = q.segments();
    j["values"] = q.values();
    j["symmetric"] = q.symmetric();
    return j.dump();
}

Potential load_potential(const std::string& path) {
    return potential_from_json_text(slurp(path));
}

void save_potential(const Potential& q, const std::string& path) {
    spit(path, potential_to_json_text(q));
}

SpectrumData spectrum_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("spectrum file: bad JSON: ") +
                                    e.what());
    }
    SpectrumData s;
    auto vec = [&](const char* key, auto& dst) {
        if (j.contains(key)) {
            if (!j[key].is_array())
                throw std::invalid_argument(std::string("spectrum file: \"") +
                                            key + "\" must be an array");
            dst = j[key].get<std::decay_t<decltype(dst)>>();
        }
    };
    vec("gamma", s.gamma);
    vec("alpha", s.alpha);
    vec("beta", s.beta);
    vec("lambda", s.lambda);
    vec("lambda_plus", s.lambda_plus);
    vec("mu", s.mu);
    vec("nu", s.nu);
    vec("omega", s.omega);
    vec("eps", s.eps);
    vec("eta", s.eta);
    if (j.contains("a")) s.a = j["a"].get<double>();
    if (j.contains("b")) s.b = j["b"].get<double>();
    if (j.contains("h")) s.h = j["h"].get<double>();
    return s;
}

std::string spectrum_to_json_text(const SpectrumData& s) {
    json j = json::object();
    auto put = [&](const char* key, const auto& v) {
        if (!v.empty()) j[key] = v;
    };
    put("gamma", s.gamma);
    put("alpha", s.alpha);
    put("beta", s.beta);
    put("lambda", s.lambda);
    put("lambda_plus", s.lambda_plus);
    put("mu", s.mu);
    put("nu", s.nu);
    put("omega", s.omega);
    put("eps", s.eps);
    put("eta", s.eta);
    if (s.a) j["a"] = *s.a;
    if (s.b) j["b"] = *s.b;
    if (s.h) j["h"] = *s.h;
    return j.dump();
}

SpectrumData load_spectrum(const std::string& path) {
    return spectrum_from_json_text(slurp(path));
}

void save_spectrum(const SpectrumData& s, const std::string& path) {
    spit(path, spectrum_to_json_text(s));
}

}  // namespace slspec
