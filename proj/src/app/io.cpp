#include "xva/app/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "xva/errors.hpp"

namespace xva::app {

namespace {

constexpr char kPathsMagic[8] = {'X', 'V', 'A', 'P', 'A', 'T', 'H', '1'};
constexpr char kGridMagic[8] = {'X', 'V', 'A', 'G', 'R', 'I', 'D', '1'};

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

template <class T>
void put(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

void put(std::ofstream& out, const std::vector<double>& values) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
}

template <class T>
T take(std::ifstream& in, const std::string& path) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw DomainError("truncated file '" + path + "'");
    return value;
}

std::vector<double> take_block(std::ifstream& in, std::size_t n, const std::string& path) {
    std::vector<double> out(n);
    in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw DomainError("truncated file '" + path + "'");
    return out;
}

std::size_t find_node(const std::vector<double>& nodes, double value) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), value);
    return static_cast<std::size_t>(it - nodes.begin());
}

} // namespace

std::string fmt(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    auto out = open_out(path);
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_json(const std::string& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path + "'");
    return nlohmann::json::parse(in);
}

void write_paths_csv(const std::string& path, const PathSet& paths) {
    auto out = open_out(path);
    out << "path_id,t,x,v\n";
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
        if (!paths.valid[p]) continue;
        for (std::size_t j = 0; j < paths.n_nodes(); ++j) {
            out << p << ',' << fmt(paths.time(j)) << ',' << fmt(paths.x_at(p, j)) << ',' << fmt(paths.v_at(p, j))
                << '\n';
        }
    }
}

void write_paths_bin(const std::string& path, const PathSet& paths) {
    auto out = open_out(path, true);
    out.write(kPathsMagic, sizeof kPathsMagic);
    put(out, paths.master_seed);
    put(out, paths.grid.t0);
    put(out, paths.grid.T);
    put(out, static_cast<std::int32_t>(paths.grid.n_steps));
    put(out, static_cast<std::int32_t>(paths.scheme));
    put(out, static_cast<std::int32_t>(paths.record_stride));
    put(out, static_cast<std::uint64_t>(paths.n_paths));
    put(out, static_cast<std::uint64_t>(paths.n_nodes()));
    for (int k : paths.recorded_steps) put(out, static_cast<std::int32_t>(k));
    put(out, paths.x);
    put(out, paths.v);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_grid_csv(const std::string& path, const GridFunction& u, const std::vector<double>& stderr_) {
    auto out = open_out(path);
    out << "t,x,v,u,stderr\n";
    for (std::size_t it = 0; it < u.nt(); ++it) {
        for (std::size_t iv = 0; iv < u.nv(); ++iv) {
            for (std::size_t ix = 0; ix < u.nx(); ++ix) {
                const std::size_t i = u.index(it, ix, iv);
                out << fmt(u.t()[it]) << ',' << fmt(u.x()[ix]) << ',' << fmt(u.v()[iv]) << ',' << fmt(u.values()[i])
                    << ',' << fmt(i < stderr_.size() ? stderr_[i] : 0.0) << '\n';
            }
        }
    }
}

GridData read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,x,v,u", 0) != 0) {
        throw DomainError("'" + path + "' is not a grid csv (expected header t,x,v,u[,stderr])");
    }
    struct Row {
        double t, x, v, u, se;
    };
    std::vector<Row> rows;
    std::vector<double> ts, xs, vs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        double f[5] = {0, 0, 0, 0, 0};
        std::size_t count = 0;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',') && count < 5) {
            char* end = nullptr;
            f[count] = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) throw DomainError(path + ":" + std::to_string(line_no) + ": bad number");
            ++count;
        }
        if (count < 4) throw DomainError(path + ":" + std::to_string(line_no) + ": expected at least 4 columns");
        rows.push_back({f[0], f[1], f[2], f[3], f[4]});
        ts.push_back(f[0]);
        xs.push_back(f[1]);
        vs.push_back(f[2]);
    }
    for (auto* axis : {&ts, &xs, &vs}) {
        std::sort(axis->begin(), axis->end());
        axis->erase(std::unique(axis->begin(), axis->end()), axis->end());
    }
    if (rows.size() != ts.size() * xs.size() * vs.size()) {
        throw DomainError("'" + path + "' does not hold a full rectangular grid");
    }
    GridData data{GridFunction(Axis(ts), Axis(xs), Axis(vs)), std::vector<double>(rows.size(), 0.0)};
    for (const Row& r : rows) {
        const std::size_t i = data.u.index(find_node(ts, r.t), find_node(xs, r.x), find_node(vs, r.v));
        data.u.values()[i] = r.u;
        data.stderr_[i] = r.se;
    }
    return data;
}

void write_grid_bin(const std::string& path, const GridFunction& u, const std::vector<double>& stderr_) {
    auto out = open_out(path, true);
    out.write(kGridMagic, sizeof kGridMagic);
    put(out, static_cast<std::uint64_t>(u.nt()));
    put(out, static_cast<std::uint64_t>(u.nx()));
    put(out, static_cast<std::uint64_t>(u.nv()));
    put(out, u.t().nodes());
    put(out, u.x().nodes());
    put(out, u.v().nodes());
    put(out, u.values());
    std::vector<double> se = stderr_;
    se.resize(u.size(), 0.0);
    put(out, se);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

GridData read_grid_bin(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open '" + path + "'");
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kGridMagic, sizeof magic) != 0) throw DomainError("'" + path + "' is not a grid file");
    const auto nt = take<std::uint64_t>(in, path);
    const auto nx = take<std::uint64_t>(in, path);
    const auto nv = take<std::uint64_t>(in, path);
    Axis t(take_block(in, nt, path));
    Axis x(take_block(in, nx, path));
    Axis v(take_block(in, nv, path));
    GridData data{GridFunction(t, x, v), {}};
    data.u.values() = take_block(in, nt * nx * nv, path);
    data.stderr_ = take_block(in, nt * nx * nv, path);
    return data;
}

void write_residuals_csv(const std::string& path, const ResidualReport& report) {
    auto out = open_out(path);
    out << "checkpoint,mean,stderr,n\n";
    for (std::size_t j = 0; j < report.mean.size(); ++j) {
        const double c = report.checkpoints.size() > report.mean.size() ? report.checkpoints[j + 1]
                                                                        : report.checkpoints[j];
        out << fmt(c) << ',' << fmt(report.mean[j]) << ',' << fmt(report.stderr_[j]) << ',' << report.n << '\n';
    }
}

} // namespace xva::app
