#include "qpdcv/config.hpp"

#include "qpdcv/observables.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qpdcv {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "qubits",     "n_trot_list", "h",           "j",
    "dt",         "n_instances", "n_shots",     "bases",
    "observables", "cv_sets",    "master_seed", "noise_file",
    "noiseless_shots", "nopec_shots", "write_raw"};

}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str(), std::filesystem::path(path).parent_path().string());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::string& base_dir) {
    json d;
    try {
        d = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: bad JSON: ") + e.what());
    }
    if (!d.is_object()) throw std::runtime_error("config: top level must be an object");
    for (const auto& [key, _] : d.items())
        if (!kKnownKeys.count(key)) throw std::runtime_error("config: unknown key `" + key + "`");

    ExperimentConfig c;
    if (d.contains("qubits")) c.qubits = d["qubits"].get<int>();
    if (d.contains("n_trot_list")) c.n_trot_list = d["n_trot_list"].get<std::vector<int>>();
    if (d.contains("h")) c.h = d["h"].get<double>();
    if (d.contains("j")) c.j = d["j"].get<double>();
    if (d.contains("dt")) c.dt = d["dt"].get<double>();
    if (d.contains("n_instances")) c.n_instances = d["n_instances"].get<int>();
    if (d.contains("n_shots")) c.n_shots = d["n_shots"].get<int>();
    if (d.contains("bases")) {
        c.bases.clear();
        for (const auto& b : d["bases"]) c.bases.push_back(parse_basis(b.get<std::string>()));
    }
    if (d.contains("observables"))
        c.observables = d["observables"].get<std::vector<std::string>>();
    if (d.contains("cv_sets")) {
        c.cv_sets.clear();
        for (const auto& e : d["cv_sets"]) {
            CvSetConfig s;
            if (e.is_number_integer()) {
                s.kind = e.get<int>();
            } else {
                for (const auto& [key, _] : e.items())
                    if (key != "kind" && key != "params")
                        throw std::runtime_error("config: unknown cv_sets key `" + key + "`");
                s.kind = e.at("kind").get<int>();
                if (e.contains("params")) s.params = e["params"].get<std::vector<double>>();
            }
            c.cv_sets.push_back(std::move(s));
        }
    }
    if (d.contains("master_seed")) c.master_seed = d["master_seed"].get<uint64_t>();
    if (d.contains("noise_file")) c.noise_file = d["noise_file"].get<std::string>();
    if (d.contains("noiseless_shots")) c.noiseless_shots = d["noiseless_shots"].get<int>();
    if (d.contains("nopec_shots")) c.nopec_shots = d["nopec_shots"].get<int>();
    if (d.contains("write_raw")) c.write_raw = d["write_raw"].get<bool>();

    if (!base_dir.empty() && !c.noise_file.empty() &&
        std::filesystem::path(c.noise_file).is_relative())
        c.noise_file = (std::filesystem::path(base_dir) / c.noise_file).string();

    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& why) { throw std::invalid_argument("config: " + why); };
    if (qubits < 2) fail("qubits must be >= 2");
    if (n_trot_list.empty()) fail("n_trot_list must not be empty");
    for (int t : n_trot_list)
        if (t < 1) fail("n_trot entries must be >= 1");
    std::set<int> uniq(n_trot_list.begin(), n_trot_list.end());
    if (uniq.size() != n_trot_list.size()) fail("n_trot_list has duplicates");
    if (n_instances < 4) fail("n_instances must be >= 4");
    if (n_shots < 2) fail("n_shots must be >= 2");
    if (bases.empty()) fail("bases must not be empty");
    std::set<MeasBasis> ub(bases.begin(), bases.end());
    if (ub.size() != bases.size()) fail("bases has duplicates");
    if (observables.empty()) fail("observables must not be empty");
    for (const auto& name : observables) Observable::parse(name, qubits);  // throws if bad
    std::set<int> kinds;
    for (const auto& s : cv_sets) {
        if (s.kind < 1 || s.kind > 5) fail("cv set kind must be 1..5");
        if (!kinds.insert(s.kind).second) fail("duplicate cv set kind");
        if (!s.params.empty() && s.kind != 2 && s.kind != 3)
            fail("cv set params only apply to kinds 2 and 3");
    }
    if (noise_file.empty()) fail("noise_file must be set");
    if (noiseless_shots < 2) fail("noiseless_shots must be >= 2");
    if (nopec_shots < 2) fail("nopec_shots must be >= 2");
    if (!(dt > 0)) fail("dt must be positive");
}

std::string ExperimentConfig::to_json_text() const {
    json d;
    d["qubits"] = qubits;
    d["n_trot_list"] = n_trot_list;
    d["h"] = h;
    d["j"] = j;
    d["dt"] = dt;
    d["n_instances"] = n_instances;
    d["n_shots"] = n_shots;
    std::vector<std::string> bs;
    for (MeasBasis b : bases) bs.push_back(basis_name(b));
    d["bases"] = bs;
    d["observables"] = observables;
    json sets = json::array();
    for (const auto& s : cv_sets) {
        json e;
        e["kind"] = s.kind;
        if (!s.params.empty()) e["params"] = s.params;
        sets.push_back(e);
    }
    d["cv_sets"] = sets;
    d["master_seed"] = master_seed;
    d["noise_file"] = noise_file;
    d["noiseless_shots"] = noiseless_shots;
    d["nopec_shots"] = nopec_shots;
    d["write_raw"] = write_raw;
    return d.dump(2);
}

}  // namespace qpdcv
