#include "ehlora/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include <boost/algorithm/string/split.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "ehlora/error.hpp"

namespace ehlora {

namespace {

namespace pt = boost::property_tree;

// "section.key" -> 1-based line number, for diagnostics only.
std::map<std::string, int> index_lines(std::string_view text) {
    std::map<std::string, int> lines;
    std::istringstream in{std::string(text)};
    std::string line;
    std::string section;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        boost::algorithm::trim(line);
        if (line.empty() || line[0] == ';' || line[0] == '#') continue;
        if (line.front() == '[') {
            section = line.substr(1, line.find(']') - 1);
            boost::algorithm::trim(section);
            lines.emplace(section, n);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        boost::algorithm::trim(key);
        lines.emplace(section.empty() ? key : section + "." + key, n);
    }
    return lines;
}

class Reader {
public:
    Reader(const pt::ptree& tree, std::map<std::string, int> lines) : tree_(tree), lines_(std::move(lines)) {}

    int line_of(const std::string& field) const {
        auto it = lines_.lower_bound(field);
        if (it != lines_.end() && it->first.compare(0, field.size(), field) == 0) return it->second;
        return 0;
    }

    [[noreturn]] void fail(const std::string& field, const std::string& what) const {
        throw ConfigError(field, what, line_of(field));
    }

    // Value with any trailing "; comment" or "# comment" removed.
    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        auto sec = tree_.find(section);
        if (sec == tree_.not_found()) return std::nullopt;
        auto it = sec->second.find(key);
        if (it == sec->second.not_found()) return std::nullopt;
        std::string v = it->second.data();
        const auto cut = v.find_first_of(";#");
        if (cut != std::string::npos) v.erase(cut);
        return v;
    }

    bool number(const std::string& section, const std::string& key, double& out) const {
        const auto s = raw(section, key);
        if (!s) return false;
        out = parse_number(section + "." + key, *s);
        return true;
    }

    double parse_number(const std::string& field, const std::string& text) const {
        std::string t = boost::algorithm::trim_copy(text);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
            fail(field, "expected a number, got '" + text + "'");
        }
        return v;
    }

    bool text(const std::string& section, const std::string& key, std::string& out) const {
        const auto s = raw(section, key);
        if (!s) return false;
        out = boost::algorithm::trim_copy(*s);
        return true;
    }

private:
    const pt::ptree& tree_;
    std::map<std::string, int> lines_;
};

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s{
        {"harvester", {"voltage", "power_dbm"}},
        {"capacitor", {"capacitance", "load_off", "load_on", "operating_voltage", "initial_voltage", "mode"}},
        {"radio",
         {"tx_power_dbm", "tx_overhead_dbm", "bandwidth", "path_loss_exponent", "wavelength_m", "noise_dbm",
          "noise_figure_db", "sir_threshold_db"}},
        {"deployment", {"radius", "intensity", "rings"}},
        {"scheme", {"ud_a", "ud_b", "wd_k", "wd_w", "default"}},
        {"markov", {"bins"}},
    };
    return s;
}

void check_schema(const pt::ptree& tree, const Reader& r) {
    for (const auto& [section, body] : tree) {
        auto known = schema().find(section);
        if (known == schema().end()) r.fail(section, "unknown section, or a key outside any section");
        for (const auto& [key, value] : body) {
            (void)value;
            const auto& keys = known->second;
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                r.fail(section + "." + key, "unknown key");
            }
        }
    }
}

}  // namespace

Config parse_config(std::string_view text) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("", e.message(), static_cast<int>(e.line()));
    }
    Reader r(tree, index_lines(text));
    check_schema(tree, r);

    Config c;
    PhyConfig& p = c.phy;
    double v = 0.0;
    std::string s;

    r.number("harvester", "voltage", p.harvester_voltage);
    if (r.number("harvester", "power_dbm", v)) p.harvest_power = dbm_to_watts(v);

    r.number("capacitor", "capacitance", p.capacitance);
    r.number("capacitor", "load_off", p.load_off);
    r.number("capacitor", "load_on", p.load_on);
    r.number("capacitor", "operating_voltage", p.operating_voltage);
    r.number("capacitor", "initial_voltage", p.initial_voltage);
    if (r.text("capacitor", "mode", s)) {
        try {
            c.mode = capacitor_mode_from_string(s);
        } catch (const ConfigError&) {
            r.fail("capacitor.mode", "expected 'literal' or 'thevenin', got '" + s + "'");
        }
    }

    if (r.number("radio", "tx_power_dbm", v)) p.tx_power = dbm_to_watts(v);
    if (r.number("radio", "tx_overhead_dbm", v)) p.tx_overhead = dbm_to_watts(v);
    r.number("radio", "bandwidth", p.bandwidth);
    r.number("radio", "path_loss_exponent", p.path_loss_exponent);
    r.number("radio", "wavelength_m", p.wavelength);
    double nf = 6.0;
    r.number("radio", "noise_figure_db", nf);
    if (r.number("radio", "noise_dbm", v)) {
        p.noise = dbm_to_watts(v);
    } else {
        if (!(p.bandwidth > 0)) r.fail("radio.bandwidth", "must be positive");
        p.noise = thermal_noise_watts(p.bandwidth, nf);
    }
    if (r.number("radio", "sir_threshold_db", v)) p.sir_threshold = db_to_linear(v);

    const bool has_radius = r.number("deployment", "radius", p.disk_radius);
    r.number("deployment", "intensity", p.intensity);
    if (r.text("deployment", "rings", s)) {
        std::vector<std::string> parts;
        boost::algorithm::split(parts, s, [](char ch) { return ch == ','; });
        if (parts.size() != kNumRings + 1) {
            r.fail("deployment.rings", fmt::format("expected {} comma-separated radii l0..l6", kNumRings + 1));
        }
        for (std::size_t n = 0; n < parts.size(); ++n) p.ring_radii[n] = r.parse_number("deployment.rings", parts[n]);
        if (!has_radius) p.disk_radius = p.ring_radii[kNumRings];
    } else {
        p.ring_radii = PhyConfig::equal_rings(p.disk_radius);
    }

    double ud_a = c.uniform.first(), ud_b = c.uniform.second();
    r.number("scheme", "ud_a", ud_a);
    r.number("scheme", "ud_b", ud_b);
    double wd_k = c.weibull.first(), wd_w = c.weibull.second();
    r.number("scheme", "wd_k", wd_k);
    r.number("scheme", "wd_w", wd_w);
    try {
        c.uniform = ChargingScheme::uniform(ud_a, ud_b);
    } catch (const ConfigError&) {
        r.fail("scheme.ud_a", "Uniform requires 0 <= a < b");
    }
    try {
        c.weibull = ChargingScheme::weibull(wd_k, wd_w);
    } catch (const ConfigError&) {
        r.fail("scheme.wd_k", "Weibull requires k > 0 and w > 0");
    }
    if (r.text("scheme", "default", s)) {
        try {
            c.default_kind = charging_kind_from_string(s);
        } catch (const ConfigError&) {
            r.fail("scheme.default", "expected 'ud' or 'wd', got '" + s + "'");
        }
    }

    if (r.number("markov", "bins", v)) {
        if (!(v >= 1) || v != static_cast<int>(v)) r.fail("markov.bins", "must be a positive integer");
        c.bins = static_cast<int>(v);
    }

    try {
        p.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(e.field(), e.detail(), r.line_of(e.field()));
    }
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string to_ini(const Config& c) {
    const PhyConfig& p = c.phy;
    std::string rings;
    for (int n = 0; n <= kNumRings; ++n) rings += fmt::format("{}{:.17g}", n ? ", " : "", p.ring_radii[n]);
    return fmt::format(
        "[harvester]\n"
        "voltage = {:.17g}\n"
        "power_dbm = {:.17g}\n"
        "\n[capacitor]\n"
        "capacitance = {:.17g}\n"
        "load_off = {:.17g}\n"
        "load_on = {:.17g}\n"
        "operating_voltage = {:.17g}\n"
        "initial_voltage = {:.17g}\n"
        "mode = {}\n"
        "\n[radio]\n"
        "tx_power_dbm = {:.17g}\n"
        "tx_overhead_dbm = {:.17g}\n"
        "bandwidth = {:.17g}\n"
        "path_loss_exponent = {:.17g}\n"
        "wavelength_m = {:.17g}\n"
        "noise_dbm = {:.17g}\n"
        "sir_threshold_db = {:.17g}\n"
        "\n[deployment]\n"
        "radius = {:.17g}\n"
        "intensity = {:.17g}\n"
        "rings = {}\n"
        "\n[scheme]\n"
        "ud_a = {:.17g}\n"
        "ud_b = {:.17g}\n"
        "wd_k = {:.17g}\n"
        "wd_w = {:.17g}\n"
        "default = {}\n"
        "\n[markov]\n"
        "bins = {}\n",
        p.harvester_voltage, watts_to_dbm(p.harvest_power), p.capacitance, p.load_off, p.load_on,
        p.operating_voltage, p.initial_voltage, to_string(c.mode), watts_to_dbm(p.tx_power),
        watts_to_dbm(p.tx_overhead), p.bandwidth, p.path_loss_exponent, p.wavelength, watts_to_dbm(p.noise),
        10.0 * std::log10(p.sir_threshold), p.disk_radius, p.intensity, rings, c.uniform.first(), c.uniform.second(),
        c.weibull.first(), c.weibull.second(), c.default_kind == ChargingKind::Uniform ? "ud" : "wd", c.bins);
}

}  // namespace ehlora
