#include "fswitch/config_io.hpp"

#include <fstream>
#include <set>

#include "fswitch/errors.hpp"

namespace fswitch {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double number(const json& obj, const char* key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

DriveSchedule bond_from_json(const json& b, std::size_t index) {
    const std::string where = "bonds[" + std::to_string(index) + "]";
    reject_unknown(b, {"kind", "amplitude", "frequency", "phase", "x1", "x2"}, where);
    const std::string kind = b.value("kind", "cosine");
    if (!b.contains("amplitude")) throw ConfigError(where + " needs an amplitude");
    const double amp = number(b, "amplitude", where);
    if (kind == "constant") {
        if (b.contains("frequency") || b.contains("phase") || b.contains("x1") || b.contains("x2")) {
            throw ConfigError(where + ": constant bond takes only an amplitude");
        }
        return DriveSchedule::constant(amp);
    }
    if (kind == "cosine") {
        if (b.contains("x1") || b.contains("x2")) throw ConfigError(where + ": x1/x2 belong to bessel bonds");
        return DriveSchedule::cosine(amp, number_or(b, "frequency", 0.0, where), number_or(b, "phase", 0.0, where));
    }
    if (kind == "bessel") {
        if (b.contains("phase")) throw ConfigError(where + ": bessel bond has no phase");
        ControlFunction cf;
        cf.omega = number(b, "frequency", where);
        cf.x1 = number_or(b, "x1", ControlFunction::kDefaultX1, where);
        cf.x2 = number_or(b, "x2", ControlFunction::kDefaultX2, where);
        return DriveSchedule::bessel_controlled(amp, cf);
    }
    throw ConfigError(where + ": unknown bond kind '" + kind + "'");
}

json bond_to_json(const DriveSchedule& s) {
    if (const auto* c = std::get_if<ConstantDrive>(&s.variant())) {
        return {{"kind", "constant"}, {"amplitude", c->value}};
    }
    if (const auto* c = std::get_if<CosineDrive>(&s.variant())) {
        return {{"kind", "cosine"}, {"amplitude", c->amplitude}, {"frequency", c->frequency}, {"phase", c->phase}};
    }
    const auto& b = std::get<BesselControlledDrive>(s.variant());
    return {{"kind", "bessel"},
            {"amplitude", b.base},
            {"frequency", b.control.omega},
            {"x1", b.control.x1},
            {"x2", b.control.x2}};
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
    try {
        reject_unknown(j, {"L", "g", "model", "bonds", "lambda0", "local_drives", "initial", "dt", "t_final",
                           "record_stride"},
                       "config");
        RunConfig rc;
        LatticeConfig& c = rc.lattice;
        if (!j.contains("L") || !j.at("L").is_number_integer()) throw ConfigError("config.L must be an integer");
        c.sites = j.at("L").get<int>();
        c.g = number_or(j, "g", 1.0, "config");
        c.model = parse_model_kind(j.value("model", std::string("bond_driven")));

        if (j.contains("bonds")) {
            const json& bonds = j.at("bonds");
            if (!bonds.is_array()) throw ConfigError("config.bonds must be an array");
            for (std::size_t i = 0; i < bonds.size(); ++i) c.bonds.push_back(bond_from_json(bonds[i], i));
        }
        if (j.contains("lambda0")) {
            if (c.model != ModelKind::LocalDriven) throw ConfigError("lambda0 is only valid for local_driven");
            c.lambda0 = number(j, "lambda0", "config");
        }
        if (j.contains("local_drives")) {
            const json& drives = j.at("local_drives");
            if (!drives.is_array()) throw ConfigError("config.local_drives must be an array");
            for (std::size_t i = 0; i < drives.size(); ++i) {
                const std::string where = "local_drives[" + std::to_string(i) + "]";
                reject_unknown(drives[i], {"site", "epsilon", "nu"}, where);
                if (!drives[i].contains("site") || !drives[i].at("site").is_number_integer()) {
                    throw ConfigError(where + ".site must be an integer");
                }
                const int site = drives[i].at("site").get<int>();
                if (c.local_drives.contains(site)) throw ConfigError(where + ": site driven twice");
                c.local_drives[site] = LocalDrive{number(drives[i], "epsilon", where), number(drives[i], "nu", where)};
            }
        }
        if (j.contains("initial")) {
            if (!j.at("initial").is_string()) throw ConfigError("config.initial must be a string");
            c.initial = parse_spins(j.at("initial").get<std::string>());
        } else {
            c.initial.assign(static_cast<std::size_t>(std::max(c.sites, 0)), Spin::Up);
        }
        if (j.contains("dt")) rc.dt = number(j, "dt", "config");
        if (j.contains("t_final")) rc.t_final = number(j, "t_final", "config");
        if (j.contains("record_stride")) {
            if (!j.at("record_stride").is_number_integer()) throw ConfigError("record_stride must be an integer");
            rc.record_stride = j.at("record_stride").get<int>();
        }
        c.validate();
        if (rc.dt && !(*rc.dt > 0.0)) throw ConfigError("dt must be positive");
        if (rc.t_final && rc.dt && *rc.t_final < *rc.dt) throw ConfigError("t_final must be >= dt");
        if (rc.record_stride && *rc.record_stride < 1) throw ConfigError("record_stride must be >= 1");
        return rc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

json to_json(const LatticeConfig& c) {
    json j;
    j["L"] = c.sites;
    j["g"] = c.g;
    j["model"] = to_string(c.model);
    if (c.model == ModelKind::BondDriven) {
        j["bonds"] = json::array();
        for (const DriveSchedule& s : c.bonds) j["bonds"].push_back(bond_to_json(s));
    } else {
        j["lambda0"] = c.lambda0;
        j["local_drives"] = json::array();
        for (const auto& [site, d] : c.local_drives) {
            j["local_drives"].push_back({{"site", site}, {"epsilon", d.epsilon}, {"nu", d.nu}});
        }
    }
    j["initial"] = format_spins(c.initial);
    return j;
}

json to_json(const RunConfig& rc) {
    json j = to_json(rc.lattice);
    if (rc.dt) j["dt"] = *rc.dt;
    if (rc.t_final) j["t_final"] = *rc.t_final;
    if (rc.record_stride) j["record_stride"] = *rc.record_stride;
    return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    return run_config_from_json(j);
}

void apply_override(RunConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;  // bare strings such as initial=uuud or model=local_driven
    }

    json doc = to_json(config);
    json* target = &doc;
    std::string path = key;
    for (;;) {
        const auto dot = path.find('.');
        const std::string head = path.substr(0, dot);
        if (dot == std::string::npos) {
            if (target->is_array()) throw ConfigError("override '" + key + "' must name a field");
            (*target)[head] = value;
            break;
        }
        if (target->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(head);
            } catch (const std::exception&) {
                throw ConfigError("override '" + key + "': '" + head + "' is not an index");
            }
            if (idx >= target->size()) throw ConfigError("override '" + key + "': index out of range");
            target = &(*target)[idx];
        } else {
            if (!target->contains(head)) throw ConfigError("override '" + key + "': no field '" + head + "'");
            target = &(*target)[head];
        }
        path = path.substr(dot + 1);
    }

    // Resizing L keeps the chain shape: extra bonds copy the last one and the
    // initial string is padded with up spins (or truncated).
    if (key == "L" && value.is_number_integer()) {
        const int L = value.get<int>();
        if (L < 2) throw ConfigError("override L must be >= 2");
        if (doc.contains("bonds") && doc["bonds"].is_array() && !doc["bonds"].empty()) {
            json last = doc["bonds"].back();
            while (static_cast<int>(doc["bonds"].size()) < L - 1) doc["bonds"].push_back(last);
            while (static_cast<int>(doc["bonds"].size()) > L - 1) doc["bonds"].erase(doc["bonds"].size() - 1);
        }
        std::string init = doc.value("initial", std::string());
        if (static_cast<int>(init.size()) != L) {
            const bool last_down = !init.empty() && init.back() == 'd';
            init.assign(static_cast<std::size_t>(L), 'u');
            if (last_down) init.back() = 'd';
            doc["initial"] = init;
        }
    }
    config = run_config_from_json(doc);
}

}  // namespace fswitch
