#include "qpdcv/archive.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qpdcv {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::ofstream open_out(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) throw std::runtime_error("archive: cannot write " + p.string());
    return f;
}

std::ifstream open_in(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw std::runtime_error("archive: cannot read " + p.string());
    return f;
}

// instances are stored as a hex bitmask over positions (1 = second table
// entry chosen); the layout relies on the two-entry structure of the
// cancellation decomposition
std::string indices_to_hex(const SampledInstance& inst) {
    std::string hex((inst.k.size() + 3) / 4, '0');
    for (std::size_t m = 0; m < inst.k.size(); ++m) {
        if (inst.k[m] == 0) continue;
        if (inst.k[m] != 1) throw std::runtime_error("archive: position index exceeds bitmask");
        const std::size_t nib = m / 4;
        int v = hex[nib] <= '9' ? hex[nib] - '0' : hex[nib] - 'a' + 10;
        v |= 1 << (m % 4);
        hex[nib] = v < 10 ? char('0' + v) : char('a' + v - 10);
    }
    return hex;
}

std::vector<uint32_t> hex_to_indices(const std::string& hex, std::size_t n_positions) {
    if (hex.size() != (n_positions + 3) / 4)
        throw std::runtime_error("archive: bitmask length mismatch");
    std::vector<uint32_t> k(n_positions, 0);
    for (std::size_t m = 0; m < n_positions; ++m) {
        const char c = hex[m / 4];
        const int v = c <= '9' ? c - '0' : c - 'a' + 10;
        k[m] = (v >> (m % 4)) & 1;
    }
    return k;
}

const char* kResultsHeader =
    "circuit_id\tn_trot\tbasis\tobservable\tmethod\tn\tn_cv\tt_hat\tsigma_sq\tdaf\tsorp\t"
    "residual\tt_noiseless\ts2_noiseless\tt_nopec\ts2_nopec\tsvar_wx\tintra\tinter\t"
    "ceiling_daf\tceiling_sorp";

}  // namespace

uint64_t fnv1a64_bytes(const std::string& bytes) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

void save_meta(const std::string& dir, const ExperimentConfig& config,
               const std::string& config_source_text) {
    const std::string source =
        config_source_text.empty() ? config.to_json_text() : config_source_text;
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a64_bytes(source));

    nlohmann::json meta;
    meta["version"] = kCodeVersion;
    meta["master_seed"] = config.master_seed;
    meta["config_hash"] = hash;
    meta["config"] = nlohmann::json::parse(config.to_json_text());
    auto f = open_out(fs::path(dir) / "meta.json");
    f << meta.dump(2) << "\n";
}

void save_circuits(const std::string& dir, const ExperimentResult& result) {
    auto f = open_out(fs::path(dir) / "circuits.tsv");
    f << "circuit_id\tn_trot\tgamma\tm_nominal\tm_kept\tn_sigma_k\tlog_n_pi_k\n";
    for (const CircuitSummary& c : result.circuits)
        f << c.circuit_id << '\t' << c.n_trot << '\t' << fmt(c.gamma) << '\t' << c.m_nominal
          << '\t' << c.m_kept << '\t' << c.n_sigma_k << '\t' << fmt(c.log_n_pi_k) << '\n';
}

void save_results(const std::string& dir, const ExperimentResult& result) {
    auto f = open_out(fs::path(dir) / "results.tsv");
    f << kResultsHeader << '\n';
    for (const TaskResult& t : result.tasks)
        for (const MethodOutcome& m : t.methods) {
            f << t.circuit_id << '\t' << t.n_trot << '\t' << basis_name(t.basis) << '\t'
              << t.observable << '\t' << m.method << '\t' << m.est.n << '\t' << m.est.n_cv
              << '\t' << fmt(m.est.t_hat) << '\t' << fmt(m.est.sigma_sq) << '\t' << fmt(m.daf)
              << '\t' << fmt(m.sorp) << '\t' << fmt(m.residual) << '\t' << fmt(t.t_noiseless)
              << '\t' << fmt(t.s2_noiseless) << '\t' << fmt(t.t_nopec) << '\t'
              << fmt(t.s2_nopec) << '\t' << fmt(t.decomp.svar_wx) << '\t'
              << fmt(t.decomp.intra) << '\t' << fmt(t.decomp.inter) << '\t'
              << fmt(t.decomp.ceiling_daf) << '\t' << fmt(t.decomp.ceiling_sorp) << '\n';
        }
}

void save_raw_instances(const std::string& dir, const Pipeline& p) {
    for (const CircuitData& c : p.circuits) {
        auto f = open_out(fs::path(dir) / "raw" / c.circuit_id / "instances.tsv");
        f << "instance\tw_sign\tw_log_mag\tk_bits\n";
        for (std::size_t i = 0; i < c.instances.size(); ++i) {
            const SampledInstance& inst = c.instances[i];
            f << i << '\t' << inst.weight.sign << '\t' << fmt(inst.weight.log_mag) << '\t'
              << indices_to_hex(inst) << '\n';
        }
    }
}

void save_raw_shots(const std::string& dir, const Pipeline& p, const ExperimentConfig& config) {
    for (const CircuitData& c : p.circuits) {
        for (const auto& [basis, rows] : c.sim) {
            auto f = open_out(fs::path(dir) / "raw" / c.circuit_id /
                              (std::string("shots_") + basis_name(basis) + ".tsv"));
            f << "instance";
            for (const Observable& o : p.observables) f << "\tmean_" << o.name << "\tvar_" << o.name;
            f << '\n';
            for (std::size_t i = 0; i < rows.size(); ++i) {
                f << i;
                for (std::size_t o = 0; o < p.observables.size(); ++o)
                    f << '\t' << fmt(rows[i].mean[o]) << '\t' << fmt(rows[i].shot_var[o]);
                f << '\n';
            }
        }
        auto f = open_out(fs::path(dir) / "raw" / c.circuit_id / "refs.tsv");
        f << "basis\tkind\tshots";
        for (const Observable& o : p.observables) f << "\tmean_" << o.name << "\tvar_" << o.name;
        f << '\n';
        auto row = [&](MeasBasis b, const char* kind, int shots, const InstanceResult& r) {
            f << basis_name(b) << '\t' << kind << '\t' << shots;
            for (std::size_t o = 0; o < p.observables.size(); ++o)
                f << '\t' << fmt(r.mean[o]) << '\t' << fmt(r.shot_var[o]);
            f << '\n';
        };
        for (const auto& [basis, r] : c.noiseless) row(basis, "noiseless", config.noiseless_shots, r);
        for (const auto& [basis, r] : c.nopec) row(basis, "nopec", config.nopec_shots, r);
    }
}

void save_archive(const std::string& dir, const ExperimentConfig& config,
                  const std::string& config_source_text, const ExperimentOutput& output) {
    save_meta(dir, config, config_source_text);
    save_circuits(dir, output.result);
    save_results(dir, output.result);
    if (config.write_raw) {
        save_raw_instances(dir, output.pipeline);
        save_raw_shots(dir, output.pipeline, config);
    }
}

void load_raw_instances(const std::string& dir, Pipeline& p) {
    for (CircuitData& c : p.circuits) {
        auto f = open_in(fs::path(dir) / "raw" / c.circuit_id / "instances.tsv");
        std::string line;
        std::getline(f, line);  // header
        c.instances.clear();
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            std::size_t idx;
            SampledInstance inst;
            std::string hex;
            double log_mag;
            if (!(row >> idx >> inst.weight.sign >> log_mag >> hex))
                throw std::runtime_error("archive: bad instances row in " + c.circuit_id);
            inst.weight.log_mag = log_mag;
            inst.k = hex_to_indices(hex, c.qpd.model.n_positions());
            if (idx != c.instances.size())
                throw std::runtime_error("archive: instances out of order in " + c.circuit_id);
            c.instances.push_back(std::move(inst));
        }
    }
}

void load_raw_shots(const std::string& dir, Pipeline& p, const ExperimentConfig& config) {
    const std::size_t n_obs = p.observables.size();
    for (CircuitData& c : p.circuits) {
        for (MeasBasis basis : config.bases) {
            auto f = open_in(fs::path(dir) / "raw" / c.circuit_id /
                             (std::string("shots_") + basis_name(basis) + ".tsv"));
            std::string line;
            std::getline(f, line);  // header
            auto& rows = c.sim[basis];
            rows.clear();
            while (std::getline(f, line)) {
                if (line.empty()) continue;
                std::istringstream row(line);
                std::size_t idx;
                row >> idx;
                InstanceResult r;
                r.mean.resize(n_obs);
                r.shot_var.resize(n_obs);
                for (std::size_t o = 0; o < n_obs; ++o) row >> r.mean[o] >> r.shot_var[o];
                if (!row) throw std::runtime_error("archive: bad shots row in " + c.circuit_id);
                rows.push_back(std::move(r));
            }
            if (rows.size() != std::size_t(config.n_instances))
                throw std::runtime_error("archive: wrong shot row count in " + c.circuit_id);
        }
        auto f = open_in(fs::path(dir) / "raw" / c.circuit_id / "refs.tsv");
        std::string line;
        std::getline(f, line);
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string basis_s, kind;
            int shots;
            row >> basis_s >> kind >> shots;
            InstanceResult r;
            r.mean.resize(n_obs);
            r.shot_var.resize(n_obs);
            for (std::size_t o = 0; o < n_obs; ++o) row >> r.mean[o] >> r.shot_var[o];
            if (!row) throw std::runtime_error("archive: bad refs row in " + c.circuit_id);
            (kind == "noiseless" ? c.noiseless : c.nopec)[parse_basis(basis_s)] = std::move(r);
        }
    }
}

std::vector<ResultRow> load_results(const std::string& dir) {
    auto f = open_in(fs::path(dir) / "results.tsv");
    std::string line;
    std::getline(f, line);
    if (line != kResultsHeader) throw std::runtime_error("archive: unexpected results header");
    std::vector<ResultRow> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> t;
        std::size_t start = 0;
        for (std::size_t pos = 0; pos <= line.size(); ++pos)
            if (pos == line.size() || line[pos] == '\t') {
                t.push_back(line.substr(start, pos - start));
                start = pos + 1;
            }
        if (t.size() != 21) throw std::runtime_error("archive: bad results row");
        // strtod handles the inf that an unbounded ceiling prints
        auto d = [&](int i) { return std::strtod(t[i].c_str(), nullptr); };
        ResultRow r;
        r.circuit_id = t[0];
        r.n_trot = std::stoi(t[1]);
        r.basis = t[2];
        r.observable = t[3];
        r.method = t[4];
        r.n = std::stoull(t[5]);
        r.n_cv = std::stoull(t[6]);
        r.t_hat = d(7);
        r.sigma_sq = d(8);
        r.daf = d(9);
        r.sorp = d(10);
        r.residual = d(11);
        r.t_noiseless = d(12);
        r.s2_noiseless = d(13);
        r.t_nopec = d(14);
        r.s2_nopec = d(15);
        r.svar_wx = d(16);
        r.intra = d(17);
        r.inter = d(18);
        r.ceiling_daf = d(19);
        r.ceiling_sorp = d(20);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace qpdcv
