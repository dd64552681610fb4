#include "bilat/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <sstream>

#include <json.hpp>

#include "bilat/errors.hpp"
#include "bilat/log.hpp"
#include "bilat/so3.hpp"

namespace bilat {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Config parsing

struct Value {
    enum class Kind { Number, String, Bool, Array } kind = Kind::Number;
    double number = 0.0;
    std::string text;
    bool flag = false;
    std::vector<double> items;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& s, int line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v)) {
        throw ParseError("config line " + std::to_string(line_no) + ": '" + s +
                         "' is not a finite number");
    }
    return v;
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') {
            in_string = !in_string;
        } else if (line[i] == '#' && !in_string) {
            return line.substr(0, i);
        }
    }
    return line;
}

Value parse_value(const std::string& raw, int line_no) {
    Value v;
    const std::string s = trim(raw);
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (s.empty()) {
        throw ParseError(where + "missing value");
    }
    if (s.front() == '"') {
        const auto close = s.find('"', 1);
        if (close == std::string::npos || close + 1 != s.size()) {
            throw ParseError(where + "unterminated or trailing text after string");
        }
        v.kind = Value::Kind::String;
        v.text = s.substr(1, close - 1);
    } else if (s.front() == '[') {
        if (s.back() != ']') {
            throw ParseError(where + "unterminated array");
        }
        v.kind = Value::Kind::Array;
        const std::string body = trim(std::string_view(s).substr(1, s.size() - 2));
        if (!body.empty()) {
            std::istringstream items(body);
            std::string item;
            while (std::getline(items, item, ',')) {
                v.items.push_back(parse_number(trim(item), line_no));
            }
        }
    } else if (s == "true" || s == "false") {
        v.kind = Value::Kind::Bool;
        v.flag = s == "true";
    } else {
        v.number = parse_number(s, line_no);
    }
    return v;
}

class ConfigBuilder {
public:
    ConfigBuilder(ExperimentConfig& cfg, fs::path base) : cfg_(cfg), base_(std::move(base)) {}

    void apply(const std::string& key, const Value& v, int line_no) {
        line_ = line_no;
        SimConfig& sim = cfg_.sim;
        ControllerSettings& ctl = sim.controller;
        OperatorParams& op = sim.op;

        static const std::map<std::string, double OperatorParams::*> op_scalars = {
            {"kp_traj", &OperatorParams::kp_traj},
            {"kd_traj", &OperatorParams::kd_traj},
            {"radius", &OperatorParams::radius},
            {"duration", &OperatorParams::duration},
            {"surface_height", &OperatorParams::surface_height},
            {"force_amplitude", &OperatorParams::force_amplitude},
            {"force_cycles", &OperatorParams::force_cycles},
            {"rotation_final", &OperatorParams::rotation_final},
        };
        static const std::map<std::string, Vec6 Gains::*> gain_fields = {
            {"kp", &Gains::kp}, {"kd", &Gains::kd}, {"kw", &Gains::kw}};

        if (auto it = op_scalars.find(key); it != op_scalars.end()) {
            op.*(it->second) = number(key, v);
        } else if (auto g = gain_fields.find(key); g != gain_fields.end()) {
            ctl.gains.*(g->second) = vec<6>(key, v);
        } else if (key == "alpha") {
            const double a = number(key, v);
            if (a != std::floor(a) || a < 1.0 || a > 1000.0) {
                throw ValidationError("alpha must be a positive integer, got " + v_text(a));
            }
            ctl.scaling.alpha = static_cast<int>(a);
        } else if (key == "beta") {
            ctl.scaling.beta = vec<3>(key, v);
        } else if (key == "gamma") {
            ctl.scaling.gamma = vec<6>(key, v);
        } else if (key == "variant") {
            ctl.variant = parse_variant(string(key, v));
        } else if (key == "damping") {
            ctl.damping = number(key, v);
        } else if (key == "h_error_scale") {
            ctl.h_error_scale = number(key, v);
        } else if (key == "frequency") {
            sim.frequency = number(key, v);
        } else if (key == "substeps") {
            const double n = number(key, v);
            if (n != std::floor(n) || n < 1.0 || n > 1e6) {
                throw ValidationError("substeps must be a positive integer");
            }
            sim.substeps = static_cast<int>(n);
        } else if (key == "selection") {
            op.selection = vec<6>(key, v, false);
        } else if (key == "model") {
            sim.chain_l = load_chain_file(resolve(string(key, v)));
            sim.chain_f = sim.chain_l;
        } else if (key == "leader_model") {
            sim.chain_l = load_chain_file(resolve(string(key, v)));
        } else if (key == "follower_model") {
            sim.chain_f = load_chain_file(resolve(string(key, v)));
        } else if (key == "theta0_l") {
            sim.theta0_l = vec<6>(key, v, false);
        } else if (key == "theta0_f") {
            sim.theta0_f = vec<6>(key, v, false);
        } else if (key == "ik_seed") {
            sim.ik_seed = vec<6>(key, v, false);
        } else if (key == "zero_reactions") {
            sim.zero_reactions = boolean(key, v);
        } else if (key == "t_skip") {
            cfg_.t_skip = number(key, v);
        } else {
            throw ParseError(where() + "unknown key '" + key + "'");
        }
    }

private:
    std::string where() const { return "config line " + std::to_string(line_) + ": "; }

    static std::string v_text(double x) {
        std::ostringstream s;
        s << x;
        return s.str();
    }

    double number(const std::string& key, const Value& v) const {
        if (v.kind != Value::Kind::Number) {
            throw ParseError(where() + "'" + key + "' expects a number");
        }
        return v.number;
    }

    std::string string(const std::string& key, const Value& v) const {
        if (v.kind != Value::Kind::String) {
            throw ParseError(where() + "'" + key + "' expects a quoted string");
        }
        return v.text;
    }

    bool boolean(const std::string& key, const Value& v) const {
        if (v.kind != Value::Kind::Bool) {
            throw ParseError(where() + "'" + key + "' expects true or false");
        }
        return v.flag;
    }

    // A scalar broadcasts to every entry unless `broadcast` is false.
    template <int N>
    Eigen::Matrix<double, N, 1> vec(const std::string& key, const Value& v,
                                    bool broadcast = true) const {
        if (v.kind == Value::Kind::Number && broadcast) {
            return Eigen::Matrix<double, N, 1>::Constant(v.number);
        }
        if (v.kind != Value::Kind::Array || v.items.size() != static_cast<std::size_t>(N)) {
            throw ParseError(where() + "'" + key + "' expects " +
                             (broadcast ? "a number or " : std::string{}) + "an array of " +
                             std::to_string(N) + " numbers");
        }
        Eigen::Matrix<double, N, 1> out;
        for (int i = 0; i < N; ++i) {
            out[i] = v.items[i];
        }
        return out;
    }

    fs::path resolve(const std::string& p) const {
        const fs::path path(p);
        return path.is_absolute() || base_.empty() ? path : base_ / path;
    }

    ExperimentConfig& cfg_;
    fs::path base_;
    int line_ = 0;
};

// ---------------------------------------------------------------------------
// Metrics

struct Accum {
    double sum = 0.0;
    double max = 0.0;
    void add(double x) {
        sum += x;
        max = std::max(max, x);
    }
    NormStats stats(std::size_t n) const { return {n ? sum / static_cast<double>(n) : 0.0, max}; }
};

bool in_window(double t, double t_skip) { return t >= t_skip - 1e-9; }

double geodesic_norm(const Vec3& rotvec_l, const Vec3& rotvec_f, int alpha) {
    return so3::angle(so3::exp(rotvec_l) * so3::pow(so3::exp(rotvec_f), alpha).transpose());
}

// Inputs of the metrics that the CSV carries for one record.
struct MetricRow {
    double t;
    Vec3 omega_e;
    Vec3 r_e;
    Vec6 w_e;
    Vec3 rotvec_l;
    Vec3 rotvec_f;
    bool contact;
};

RunMetrics metrics_from_rows(const std::vector<MetricRow>& rows, int alpha, double t_skip) {
    RunMetrics m;
    m.records = rows.size();
    Accum omega, r, w, x, geo;
    std::size_t contacts = 0;
    for (const MetricRow& row : rows) {
        if (!in_window(row.t, t_skip)) {
            continue;
        }
        ++m.window_records;
        omega.add(row.omega_e.norm());
        r.add(row.r_e.norm());
        w.add(row.w_e.norm());
        x.add(std::sqrt(row.omega_e.squaredNorm() + row.r_e.squaredNorm()));
        geo.add(geodesic_norm(row.rotvec_l, row.rotvec_f, alpha));
        contacts += row.contact ? 1 : 0;
    }
    const std::size_t n = m.window_records;
    m.omega_e = omega.stats(n);
    m.r_e = r.stats(n);
    m.w_e = w.stats(n);
    m.x_e = x.stats(n);
    m.geodesic = geo.stats(n);
    m.contact_fraction = n ? static_cast<double>(contacts) / static_cast<double>(n) : 0.0;
    return m;
}

// ---------------------------------------------------------------------------
// Output helpers

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename Vec>
void put(std::string& line, const Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        line += ',';
        line += fmt17(v[i]);
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string());
    }
}

void write_text(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    body(out);
    out.flush();
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

nlohmann::json stats_json(const NormStats& s) { return {{"mean", s.mean}, {"max", s.max}}; }

nlohmann::json metrics_json(const RunMetrics& m) {
    return {
        {"records", m.records},
        {"window_records", m.window_records},
        {"omega_e", stats_json(m.omega_e)},
        {"r_e", stats_json(m.r_e)},
        {"w_e", stats_json(m.w_e)},
        {"x_e", stats_json(m.x_e)},
        {"geodesic_rotation_error", stats_json(m.geodesic)},
        {"contact_fraction", m.contact_fraction},
    };
}

template <int N>
std::vector<double> to_list(const Eigen::Matrix<double, N, 1>& v) {
    return {v.data(), v.data() + N};
}

nlohmann::json config_json(const ExperimentConfig& cfg) {
    const SimConfig& s = cfg.sim;
    const ControllerSettings& c = s.controller;
    return {
        {"variant", std::string(to_string(c.variant))},
        {"alpha", c.scaling.alpha},
        {"beta", to_list<3>(c.scaling.beta)},
        {"gamma", to_list<6>(c.scaling.gamma)},
        {"kp", to_list<6>(c.gains.kp)},
        {"kd", to_list<6>(c.gains.kd)},
        {"kw", to_list<6>(c.gains.kw)},
        {"kp_traj", s.op.kp_traj},
        {"kd_traj", s.op.kd_traj},
        {"frequency", s.frequency},
        {"duration", s.op.duration},
        {"radius", s.op.radius},
        {"surface_height", s.op.surface_height},
        {"substeps", s.substeps},
        {"damping", c.damping},
        {"h_error_scale", c.h_error_scale},
        {"t_skip", cfg.t_skip},
    };
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const fs::path& base_dir) {
    ExperimentConfig cfg;
    ConfigBuilder builder(cfg, base_dir);
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        if (key.empty()) {
            throw ParseError("config line " + std::to_string(line_no) + ": empty key");
        }
        if (auto [it, inserted] = seen.emplace(key, line_no); !inserted) {
            throw ParseError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                             "' (first on line " + std::to_string(it->second) + ")");
        }
        builder.apply(key, parse_value(body.substr(eq + 1), line_no), line_no);
    }
    cfg.sim.validate();
    if (!std::isfinite(cfg.t_skip) || cfg.t_skip < 0.0) {
        throw ValidationError("t_skip must be non-negative");
    }
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw IoError("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

RunMetrics compute_metrics(const SimLog& log, int alpha, double t_skip) {
    std::vector<MetricRow> rows;
    rows.reserve(log.size());
    double max_vz = 0.0;
    for (const SimRecord& r : log) {
        rows.push_back({r.t, r.omega_e, r.r_e, r.w_e, r.rotvec_l, r.rotvec_f, r.contact});
        if (r.contact) {
            max_vz = std::max(max_vz, std::abs(r.twist_f[5]));
        }
    }
    RunMetrics m = metrics_from_rows(rows, alpha, t_skip);
    m.max_contact_z_velocity = max_vz;
    return m;
}

std::vector<std::string> csv_columns() {
    std::vector<std::string> cols{"t"};
    auto add = [&](const std::string& name, int n, const char* const* suffix) {
        for (int i = 0; i < n; ++i) {
            cols.push_back(name + "_" + (suffix ? suffix[i] : std::to_string(i)));
        }
    };
    static const char* const xyz[] = {"x", "y", "z"};
    add("theta_l", 6, nullptr);
    add("theta_f", 6, nullptr);
    add("dtheta_l", 6, nullptr);
    add("dtheta_f", 6, nullptr);
    add("p_l", 3, xyz);
    add("p_f", 3, xyz);
    add("rotvec_l", 3, xyz);
    add("rotvec_f", 3, xyz);
    add("omega_e", 3, xyz);
    add("r_e", 3, xyz);
    add("w_e", 6, nullptr);
    add("tau_l_reac", 6, nullptr);
    add("tau_f_reac", 6, nullptr);
    cols.insert(cols.end(), {"contact", "cond_H", "dropped_term_norm"});
    return cols;
}

void write_csv(const SimLog& log, std::ostream& out) {
    const auto cols = csv_columns();
    std::string line;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        line += (i ? "," : "") + cols[i];
    }
    out << line << '\n';
    for (const SimRecord& r : log) {
        line = fmt17(r.t);
        put(line, r.leader.position);
        put(line, r.follower.position);
        put(line, r.leader.velocity);
        put(line, r.follower.velocity);
        put(line, r.pose_l.p);
        put(line, r.pose_f.p);
        put(line, r.rotvec_l);
        put(line, r.rotvec_f);
        put(line, r.omega_e);
        put(line, r.r_e);
        put(line, r.w_e);
        put(line, r.tau_l_reac);
        put(line, r.tau_f_reac);
        line += r.contact ? ",1" : ",0";
        line += ',' + fmt17(r.cond_H);
        line += ',' + fmt17(r.dropped_term_norm);
        out << line << '\n';
    }
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw ParseError("csv has no column '" + std::string(name) + "'");
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("csv is empty");
    }
    {
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            table.header.push_back(cell);
        }
    }
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            row.push_back(parse_number(cell, line_no));
        }
        if (row.size() != table.header.size()) {
            throw ParseError("csv line " + std::to_string(line_no) + " has " +
                             std::to_string(row.size()) + " cells, expected " +
                             std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

RunMetrics metrics_from_csv(const CsvTable& table, int alpha, double t_skip) {
    auto vec3 = [&](const std::vector<double>& row, const std::string& name) {
        const std::size_t c = table.column(name + "_x");
        return Vec3(row[c], row[c + 1], row[c + 2]);
    };
    const std::size_t t_col = table.column("t");
    const std::size_t w_col = table.column("w_e_0");
    const std::size_t contact_col = table.column("contact");
    std::vector<MetricRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        MetricRow m;
        m.t = row[t_col];
        m.omega_e = vec3(row, "omega_e");
        m.r_e = vec3(row, "r_e");
        for (int i = 0; i < 6; ++i) {
            m.w_e[i] = row[w_col + i];
        }
        m.rotvec_l = vec3(row, "rotvec_l");
        m.rotvec_f = vec3(row, "rotvec_f");
        m.contact = row[contact_col] != 0.0;
        rows.push_back(m);
    }
    return metrics_from_rows(rows, alpha, t_skip);
}

std::vector<fs::path> emit_plots(const SimLog& log, const ScalingConfig& scaling,
                                 const fs::path& outdir) {
    if (log.empty()) {
        throw ValidationError("emit_plots: log is empty");
    }
    ensure_dir(outdir);
    const double alpha = scaling.alpha;
    const Vec3& beta = scaling.beta;
    std::vector<fs::path> files;

    auto data_file = [&](const std::string& name, const std::string& header,
                         const std::function<std::string(const SimRecord&)>& row) {
        const fs::path path = outdir / name;
        write_text(path, [&](std::ostream& out) {
            out << "# " << header << '\n';
            for (const SimRecord& r : log) {
                out << row(r) << '\n';
            }
        });
        files.push_back(path);
    };
    auto script = [&](const std::string& name, const std::string& text) {
        const fs::path path = outdir / name;
        write_text(path, [&](std::ostream& out) { out << text; });
        files.push_back(path);
    };
    auto cols = [](std::initializer_list<double> values) {
        std::string s;
        for (double v : values) {
            s += (s.empty() ? "" : " ") + fmt17(v);
        }
        return s;
    };

    data_file("pose.dat",
              "t rotvec_l[xyz] alpha*rotvec_f[xyz] p_l[xyz] beta*p_f[xyz]",
              [&](const SimRecord& r) {
                  const Vec3 rf = alpha * r.rotvec_f;
                  const Vec3 pf = beta.cwiseProduct(r.pose_f.p);
                  return cols({r.t, r.rotvec_l.x(), r.rotvec_l.y(), r.rotvec_l.z(), rf.x(), rf.y(),
                               rf.z(), r.pose_l.p.x(), r.pose_l.p.y(), r.pose_l.p.z(), pf.x(),
                               pf.y(), pf.z()});
              });
    script("pose.gp",
           "# Leader pose against the scaled follower pose, one panel per axis.\n"
           "set terminal pngcairo size 1400,800\n"
           "set output 'pose.png'\n"
           "set multiplot layout 2,3\n"
           "do for [i=0:2] {\n"
           "  set title sprintf('rotation %s', word('x y z', i+1))\n"
           "  plot 'pose.dat' using 1:(column(2+i)) with lines title 'leader', \\\n"
           "       '' using 1:(column(5+i)) with lines title 'follower (scaled)'\n"
           "}\n"
           "do for [i=0:2] {\n"
           "  set title sprintf('position %s [m]', word('x y z', i+1))\n"
           "  plot 'pose.dat' using 1:(column(8+i)) with lines title 'leader', \\\n"
           "       '' using 1:(column(11+i)) with lines title 'follower (scaled)'\n"
           "}\n"
           "unset multiplot\n");

    data_file("trajectory.dat", "p_l[xyz] beta*p_f[xyz]", [&](const SimRecord& r) {
        const Vec3 pf = beta.cwiseProduct(r.pose_f.p);
        return cols({r.pose_l.p.x(), r.pose_l.p.y(), r.pose_l.p.z(), pf.x(), pf.y(), pf.z()});
    });
    script("trajectory.gp",
           "# 3-D overview of the leader path and the scaled follower path.\n"
           "set terminal pngcairo size 900,800\n"
           "set output 'trajectory.png'\n"
           "set xlabel 'x [m]'; set ylabel 'y [m]'; set zlabel 'z [m]'\n"
           "splot 'trajectory.dat' using 1:2:3 with lines title 'leader', \\\n"
           "      '' using 4:5:6 with lines title 'follower (scaled)'\n");

    data_file("error_norm.dat", "t |omega_e| |r_e| |w_e|", [&](const SimRecord& r) {
        return cols({r.t, r.omega_e.norm(), r.r_e.norm(), r.w_e.norm()});
    });
    script("error_norm.gp",
           "# Norms of the rotation, translation and wrench errors.\n"
           "set terminal pngcairo size 900,900\n"
           "set output 'error_norm.png'\n"
           "set multiplot layout 3,1\n"
           "set title 'rotation error [rad]'\n"
           "plot 'error_norm.dat' using 1:2 with lines notitle\n"
           "set title 'translation error [m]'\n"
           "plot 'error_norm.dat' using 1:3 with lines notitle\n"
           "set title 'wrench error'\n"
           "plot 'error_norm.dat' using 1:4 with lines notitle\n"
           "unset multiplot\n");
    return files;
}

RunManifest run_experiment(const ExperimentConfig& cfg, const fs::path& outdir) {
    ensure_dir(outdir);
    log_info("running " + std::string(to_string(cfg.sim.controller.variant)) + " variant, " +
             std::to_string(std::llround(cfg.sim.op.duration * cfg.sim.frequency)) + " steps");
    const SimLog log = run(cfg.sim);

    RunManifest manifest;
    manifest.outdir = outdir;
    manifest.variant = cfg.sim.controller.variant;
    manifest.metrics = compute_metrics(log, cfg.sim.controller.scaling.alpha, cfg.t_skip);

    const fs::path csv = outdir / "log.csv";
    write_text(csv, [&](std::ostream& out) { write_csv(log, out); });
    manifest.files.push_back(csv);

    if (!log.empty()) {
        auto plots = emit_plots(log, cfg.sim.controller.scaling, outdir);
        manifest.files.insert(manifest.files.end(), plots.begin(), plots.end());
    }

    nlohmann::json summary = {
        {"variant", std::string(to_string(manifest.variant))},
        {"config", config_json(cfg)},
        {"metrics", metrics_json(manifest.metrics)},
        {"checks", {{"max_contact_z_velocity", manifest.metrics.max_contact_z_velocity}}},
    };
    const fs::path summary_path = outdir / "summary.json";
    write_text(summary_path, [&](std::ostream& out) { out << summary.dump(2) << '\n'; });
    manifest.files.push_back(summary_path);

    log_info("mean |omega_e| = " + fmt17(manifest.metrics.omega_e.mean) +
             ", mean |r_e| = " + fmt17(manifest.metrics.r_e.mean));
    return manifest;
}

ComparisonReport compare_variants(const ExperimentConfig& cfg, const fs::path& outdir) {
    ensure_dir(outdir);
    ExperimentConfig matrix_cfg = cfg;
    ExperimentConfig vector_cfg = cfg;
    matrix_cfg.sim.controller.variant = ErrorVariant::MatrixError;
    vector_cfg.sim.controller.variant = ErrorVariant::VectorError;
    // Both runs start from the same joint configuration.
    const auto [theta_l, theta_f] = initial_configuration(cfg.sim);
    for (ExperimentConfig* c : {&matrix_cfg, &vector_cfg}) {
        c->sim.theta0_l = theta_l;
        c->sim.theta0_f = theta_f;
    }

    auto vector_run = std::async(std::launch::async,
                                 [&] { return run_experiment(vector_cfg, outdir / "vector"); });
    ComparisonReport report;
    report.matrix = run_experiment(matrix_cfg, outdir / "matrix");
    report.vector = vector_run.get();

    constexpr double kNegligible = 1e-12;
    auto ratio = [&](double num, double den) -> std::optional<double> {
        if (den <= kNegligible) {
            return std::nullopt;
        }
        return num / den;
    };
    report.ratio = ratio(report.matrix.metrics.omega_e.mean, report.vector.metrics.omega_e.mean);
    report.geodesic_ratio =
        ratio(report.matrix.metrics.geodesic.mean, report.vector.metrics.geodesic.mean);

    auto opt = [](const std::optional<double>& v) -> nlohmann::json {
        return v ? nlohmann::json(*v) : nlohmann::json("N/A");
    };
    nlohmann::json out = {
        {"config", config_json(cfg)},
        {"matrix", metrics_json(report.matrix.metrics)},
        {"vector", metrics_json(report.vector.metrics)},
        {"rotation_error_ratio", opt(report.ratio)},
        {"geodesic_rotation_error_ratio", opt(report.geodesic_ratio)},
    };
    write_text(outdir / "comparison.json", [&](std::ostream& o) { o << out.dump(2) << '\n'; });
    return report;
}

}  // namespace bilat
