#include "dsm/scenario_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace dsm {

using nlohmann::json;

namespace {

Rational rational_field(const json& v, const std::string& what) {
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<long long>());
        if (v.is_number_float()) return parse_rational(v.dump());  // shortest round-trip decimal
    } catch (const std::invalid_argument& e) {
        throw ScenarioFormatError(what + ": " + e.what());
    }
    throw ScenarioFormatError(what + ": expected a number or rational string");
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioFormatError(where + ": missing field '" + key + "'");
    return *it;
}

int int_field(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer()) throw ScenarioFormatError(where + ": field '" + key + "' must be an integer");
    return v.get<int>();
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioFormatError(std::string("malformed scenario: ") + e.what());
    }
    if (!doc.is_object()) throw ScenarioFormatError("scenario must be a JSON object");

    Scenario s;
    s.horizon = int_field(doc, "horizon", "scenario");
    s.users = int_field(doc, "users", "scenario");
    const json& wrap = require(doc, "wrap_allowed", "scenario");
    if (!wrap.is_boolean()) throw ScenarioFormatError("scenario: wrap_allowed must be a boolean");
    s.wrap_allowed = wrap.get<bool>();
    const json& billing = require(doc, "billing", "scenario");
    if (!billing.is_string()) throw ScenarioFormatError("scenario: billing must be a string");
    try {
        s.billing = parse_billing_scheme(billing.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ScenarioFormatError(e.what());
    }

    const json& pricing = require(doc, "pricing", "scenario");
    const json& kind = require(pricing, "kind", "pricing");
    if (kind == "quadratic")
        s.pricing.kind = PricingFunction::Kind::Quadratic;
    else if (kind == "polynomial")
        s.pricing.kind = PricingFunction::Kind::Polynomial;
    else
        throw ScenarioFormatError("pricing: kind must be quadratic or polynomial");
    const json& coeffs = require(pricing, "coefficients", "pricing");
    if (!coeffs.is_array() || coeffs.empty()) throw ScenarioFormatError("pricing: coefficients must be a nonempty list");
    s.pricing.coefficients.clear();
    for (const auto& c : coeffs) s.pricing.coefficients.push_back(rational_field(c, "pricing coefficient"));

    const json& loads = require(doc, "loads", "scenario");
    if (!loads.is_array()) throw ScenarioFormatError("scenario: loads must be a list");
    for (const auto& l : loads) {
        if (!l.is_object()) throw ScenarioFormatError("scenario: every load must be an object");
        Load load;
        const json& id = require(l, "id", "load");
        if (!id.is_string()) throw ScenarioFormatError("load: id must be a string");
        load.id = id.get<std::string>();
        std::string where = "load '" + load.id + "'";
        const json& owner = require(l, "owner", where);
        if (owner.is_string() && owner == "background")
            load.owner = kBackgroundOwner;
        else if (owner.is_number_integer() && owner.get<int>() >= 1)
            load.owner = owner.get<int>();
        else
            throw ScenarioFormatError(where + ": owner must be a positive integer or \"background\"");
        load.rate = rational_field(require(l, "rate_kwh", where), where + " rate_kwh");
        load.duration = int_field(l, "duration", where);
        const json& k = require(l, "kind", where);
        if (k == "fixed")
            load.kind = LoadKind::Fixed;
        else if (k == "shiftable")
            load.kind = LoadKind::Shiftable;
        else
            throw ScenarioFormatError(where + ": kind must be fixed or shiftable");
        load.window_start = int_field(l, "window_start", where);
        load.window_end = int_field(l, "window_end", where);
        s.loads.push_back(std::move(load));
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioFormatError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string write_scenario(const Scenario& s) {
    using ojson = nlohmann::ordered_json;
    ojson coeffs = ojson::array();
    for (const auto& c : s.pricing.coefficients) coeffs.push_back(to_string_exact(c));
    ojson pricing;
    pricing["kind"] = s.pricing.kind == PricingFunction::Kind::Quadratic ? "quadratic" : "polynomial";
    pricing["coefficients"] = coeffs;

    // one load per line keeps generated files diffable
    std::ostringstream out;
    out << "{\n  \"horizon\": " << s.horizon << ",\n  \"users\": " << s.users
        << ",\n  \"wrap_allowed\": " << (s.wrap_allowed ? "true" : "false") << ",\n  \"billing\": "
        << ojson(to_string(s.billing)).dump() << ",\n  \"pricing\": " << pricing.dump() << ",\n  \"loads\": [";
    for (std::size_t i = 0; i < s.loads.size(); ++i) {
        const Load& l = s.loads[i];
        ojson load;
        load["id"] = l.id;
        load["owner"] = l.owner == kBackgroundOwner ? ojson("background") : ojson(l.owner);
        load["rate_kwh"] = to_string_exact(l.rate);
        load["duration"] = l.duration;
        load["kind"] = l.kind == LoadKind::Fixed ? "fixed" : "shiftable";
        load["window_start"] = l.window_start;
        load["window_end"] = l.window_end;
        out << (i ? ",\n    " : "\n    ") << load.dump();
    }
    out << "\n  ]\n}\n";
    return out.str();
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write scenario file '" + path + "'");
    out << write_scenario(s);
}

}  // namespace dsm
