#include "anonsense/fields.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "anonsense/rng.hpp"
#include "anonsense/summation.hpp"

namespace anonsense {

FieldConfig::FieldConfig(std::vector<double> omegas) : omegas_(std::move(omegas)) {
    if (omegas_.empty()) throw std::invalid_argument("FieldConfig: at least one site is required");
    for (std::size_t l = 0; l < omegas_.size(); ++l) {
        if (!std::isfinite(omegas_[l])) {
            throw std::invalid_argument("FieldConfig: omega[" + std::to_string(l) + "] is not finite");
        }
    }
}

double FieldConfig::max_omega() const noexcept {
    return *std::max_element(omegas_.begin(), omegas_.end());
}

void UniformFieldDistribution::validate() const {
    if (!std::isfinite(omega_min) || !std::isfinite(omega_max)) {
        throw std::invalid_argument("UniformFieldDistribution: bounds must be finite");
    }
    if (!(omega_min < omega_max)) {
        throw std::invalid_argument("UniformFieldDistribution: omega_min must be < omega_max");
    }
}

FieldConfig draw_fields(const UniformFieldDistribution& dist, std::size_t L) {
    if (L == 0) throw std::invalid_argument("draw_fields: L must be >= 1");
    dist.validate();
    const CounterRng rng(dist.seed, 0);
    const double width = dist.omega_max - dist.omega_min;
    std::vector<double> omegas(L);
    for (std::size_t l = 0; l < L; ++l) {
        omegas[l] = std::min(dist.omega_min + width * rng.unit_at(l), dist.omega_max);
    }
    return FieldConfig(std::move(omegas));
}

namespace {
double ipow(double x, unsigned k) noexcept {
    double r = 1.0;
    while (k != 0) {
        if (k & 1u) r *= x;
        x *= x;
        k >>= 1u;
    }
    return r;
}
}  // namespace

double exact_moment(const FieldConfig& cfg, unsigned k) {
    if (k == 0) return 1.0;
    const auto w = cfg.omegas();
    // Shifted about the first site's power.
    const double ref = ipow(w[0], k);
    NeumaierSum acc;
    for (double x : w) acc.add(ipow(x, k) - ref);
    return ref + acc.value() / static_cast<double>(w.size());
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string to_text(const FieldConfig& cfg) {
    std::string out;
    for (double w : cfg.omegas()) {
        out += format_double(w);
        out += '\n';
    }
    return out;
}

FieldConfig fields_from_text(std::string_view text) {
    std::vector<double> omegas;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        double v = 0.0;
        const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
        if (res.ec != std::errc{} || res.ptr != line.data() + line.size()) {
            throw std::invalid_argument("fields_from_text: bad number on line " + std::to_string(line_no));
        }
        omegas.push_back(v);
    }
    return FieldConfig(std::move(omegas));
}

nlohmann::json to_json(const FieldConfig& cfg) {
    return nlohmann::json(std::vector<double>(cfg.omegas().begin(), cfg.omegas().end()));
}

FieldConfig fields_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::invalid_argument("fields_from_json: expected a JSON array");
    std::vector<double> omegas;
    omegas.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw std::invalid_argument("fields_from_json: non-numeric entry");
        omegas.push_back(v.get<double>());
    }
    return FieldConfig(std::move(omegas));
}

FieldConfig load_fields(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_fields: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        return fields_from_json(nlohmann::json::parse(text));
    }
    return fields_from_text(text);
}

void save_fields(const FieldConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_fields: cannot open " + path);
    if (path.size() >= 5 && path.ends_with(".json")) {
        out << to_json(cfg).dump() << '\n';
    } else {
        out << to_text(cfg);
    }
}

}  // namespace anonsense
