#include "bqs/problem_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bqs/norms.hpp"

namespace bqs {

namespace {

Complex parse_coefficient(const std::map<std::string, std::string>& kv) {
    double re = 0.0, im = 0.0;
    if (auto it = kv.find("re"); it != kv.end()) re = std::stod(it->second);
    if (auto it = kv.find("im"); it != kv.end()) im = std::stod(it->second);
    return {re, im};
}

OperatorSymbol load_symbol_section(const ConfigDoc& doc, const std::string& section, int n,
                                   SymbolConvention conv) {
    OperatorSymbol sym(n, conv);
    for (const std::string& line : doc.get_all(section, "term")) {
        const auto kv = parse_inline_pairs(line);
        auto it = kv.find("alpha");
        if (it == kv.end())
            throw std::runtime_error("term entry needs an alpha multi-index in [" + section + "]");
        sym.add_term(parse_int_list(it->second), parse_coefficient(kv));
    }
    return sym;
}

}  // namespace

SymbolFile load_symbols(const std::string& path) {
    const ConfigDoc doc = ConfigDoc::parse_file(path);
    SymbolFile out;
    if (doc.has("", "preset")) {
        const std::string preset = doc.get("", "preset");
        out.symbols = preset_symbol(preset);
        out.n = out.symbols.L0.dim();
        return out;
    }
    out.n = doc.get_int("", "n");
    const std::string conv_name = doc.get_or("", "convention", "fourier");
    SymbolConvention conv;
    if (conv_name == "fourier")
        conv = SymbolConvention::fourier;
    else if (conv_name == "plain")
        conv = SymbolConvention::plain;
    else
        throw std::runtime_error("unknown symbol convention: " + conv_name);
    out.symbols = SymbolTriple{load_symbol_section(doc, "L0", out.n, conv),
                               load_symbol_section(doc, "L1", out.n, conv),
                               load_symbol_section(doc, "L2", out.n, conv)};
    return out;
}

namespace {

NonlocalKernel load_kernel_section(const ConfigDoc& doc, const std::string& section,
                                   double horizon) {
    if (!doc.has_section(section)) return NonlocalKernel::zero(horizon);
    const std::string type = doc.get_or(section, "type", "zero");
    if (type == "zero") return NonlocalKernel::zero(horizon);
    if (type == "atoms") {
        std::vector<NonlocalKernel::Atom> atoms;
        for (const std::string& line : doc.get_all(section, "atom")) {
            const auto kv = parse_inline_pairs(line);
            atoms.push_back({std::stod(kv.at("location")), std::stod(kv.at("weight"))});
        }
        return NonlocalKernel::atoms(horizon, atoms);
    }
    if (type == "density") {
        const int nodes = doc.get_int_or(section, "nodes", 129);
        if (doc.has(section, "values"))
            return NonlocalKernel::density(horizon, doc.get_double_list(section, "values"));
        const std::string form = doc.get(section, "form");
        if (form == "constant")
            return NonlocalKernel::constant(horizon, doc.get_double(section, "value"), nodes);
        if (form == "linear")
            return NonlocalKernel::linear(horizon, doc.get_double_or(section, "a", 0.0),
                                          doc.get_double_or(section, "b", 0.0), nodes);
        if (form == "gaussian-bump")
            return NonlocalKernel::gaussian_bump(horizon, doc.get_double(section, "amplitude"),
                                                 doc.get_double(section, "center"),
                                                 doc.get_double(section, "width"), nodes);
        throw std::runtime_error("unknown density form: " + form);
    }
    throw std::runtime_error("unknown kernel type: " + type);
}

}  // namespace

KernelFile load_kernels(const std::string& path) {
    const ConfigDoc doc = ConfigDoc::parse_file(path);
    KernelFile out;
    out.horizon = doc.get_double("", "horizon");
    out.alpha = load_kernel_section(doc, "alpha", out.horizon);
    out.beta = load_kernel_section(doc, "beta", out.horizon);
    return out;
}

namespace {

SpectralField load_shaped_field(const ConfigDoc& doc, const std::string& section,
                                const std::string& form, const SpectralGrid& grid,
                                const std::string& base_dir) {
    if (form == "zero") return SpectralField(grid, Domain::physical);
    if (form == "gaussian") {
        const double amp = doc.get_double_or(section, "amplitude", 1.0);
        const double width = doc.get_double_or(section, "width", 1.0);
        std::vector<double> center(grid.dim(), 0.0);
        if (doc.has(section, "center")) center = doc.get_double_list(section, "center");
        return sample_field(grid, [&](const std::vector<double>& x) {
            double q = 0.0;
            for (int d = 0; d < grid.dim(); ++d) {
                const double z = (x[d] - center[d]) / width;
                q += z * z;
            }
            return Complex{amp * std::exp(-0.5 * q), 0.0};
        });
    }
    if (form == "cosine-mode") {
        const double amp = doc.get_double_or(section, "amplitude", 1.0);
        const std::vector<int> mode = doc.get_int_list(section, "mode");
        if (static_cast<int>(mode.size()) != grid.dim())
            throw std::runtime_error("cosine-mode index does not match the grid dimension");
        return sample_field(grid, [&](const std::vector<double>& x) {
            double phase = 0.0;
            for (int d = 0; d < grid.dim(); ++d)
                phase += M_PI * mode[d] / grid.half_widths()[d] * x[d];
            return Complex{amp * std::cos(phase), 0.0};
        });
    }
    if (form == "samples") {
        const std::string file =
            (std::filesystem::path(base_dir) / doc.get(section, "file")).string();
        const RawSnapshot snap = read_snapshot(file);
        if (snap.n != grid.dim() || snap.points != grid.points())
            throw std::runtime_error("sample file grid does not match the problem grid");
        return SpectralField(grid, Domain::physical, snap.values);
    }
    throw std::runtime_error("unknown data form: " + form);
}

SpectralField load_data_field(const ConfigDoc& doc, const std::string& section,
                              const SpectralGrid& grid, const std::string& base_dir) {
    return load_shaped_field(doc, section, doc.get_or(section, "form", "zero"), grid, base_dir);
}

SourceTerm load_source(const ConfigDoc& doc, const SpectralGrid& grid,
                       const std::string& base_dir) {
    if (!doc.has_section("source")) return SourceTerm::zero();
    const std::string form = doc.get_or("source", "form", "zero");
    if (form == "zero") return SourceTerm::zero();
    if (form == "separable") {
        // The spatial factor reuses the data-field shapes, selected by `space`.
        const SpectralField space = load_shaped_field(
            doc, "source", doc.get_or("source", "space", "gaussian"), grid, base_dir);
        const std::string time_form = doc.get_or("source", "time", "constant");
        if (time_form == "constant") {
            const double c = doc.get_double_or("source", "value", 1.0);
            return SourceTerm::separable(space, [c](double) { return Complex{c, 0.0}; });
        }
        if (time_form == "cosine") {
            const double omega = doc.get_double_or("source", "omega", 1.0);
            return SourceTerm::separable(
                space, [omega](double t) { return Complex{std::cos(omega * t), 0.0}; });
        }
        if (time_form == "polynomial") {
            const std::vector<double> coeffs = doc.get_double_list("source", "coeffs");
            return SourceTerm::separable(space, [coeffs](double t) {
                double acc = 0.0;
                for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
                return Complex{acc, 0.0};
            });
        }
        throw std::runtime_error("unknown source time form: " + time_form);
    }
    throw std::runtime_error("unknown source form: " + form);
}

}  // namespace

Nonlinearity parse_nonlinearity(const std::string& text) {
    const auto open = text.find('(');
    if (open == std::string::npos) return register_nonlinearity(text);
    const auto close = text.find(')', open);
    if (close == std::string::npos)
        throw std::runtime_error("malformed nonlinearity spec: " + text);
    const std::string name = text.substr(0, open);
    const double param = std::stod(text.substr(open + 1, close - open - 1));
    return register_nonlinearity(name, param);
}

LinearProblem LoadedProblem::linear() const {
    return LinearProblem(grid, symbols, alpha, beta, phi, psi, source, horizon, output_times,
                         config);
}

NonlinearProblem LoadedProblem::nonlinear() const {
    const Nonlinearity f =
        nonlinearity ? parse_nonlinearity(*nonlinearity) : register_nonlinearity("zero");
    return NonlinearProblem(grid, symbols, alpha, beta, phi, psi, f, config, controls);
}

LoadedProblem load_problem(const std::string& path) {
    const ConfigDoc doc = ConfigDoc::parse_file(path);
    const std::string base_dir = std::filesystem::path(path).parent_path().string();

    SymbolTriple symbols = [&] {
        if (doc.has("", "preset")) return preset_symbol(doc.get("", "preset"));
        if (doc.has("", "symbols"))
            return load_symbols((std::filesystem::path(base_dir) / doc.get("", "symbols")).string())
                .symbols;
        throw std::runtime_error("problem file needs 'preset' or 'symbols'");
    }();
    const int n = symbols.L0.dim();

    const std::vector<int> points = doc.get_int_list("", "points");
    const double half_width = doc.get_double_or("", "half_width", M_PI);
    SpectralGrid grid = SpectralGrid::make(n, points, half_width);

    const double horizon = doc.get_double("", "horizon");
    NonlocalKernel alpha = NonlocalKernel::zero(horizon);
    NonlocalKernel beta = NonlocalKernel::zero(horizon);
    if (doc.has("", "kernels")) {
        const KernelFile kf =
            load_kernels((std::filesystem::path(base_dir) / doc.get("", "kernels")).string());
        if (kf.alpha) alpha = *kf.alpha;
        if (kf.beta) beta = *kf.beta;
    }

    SolverConfig config;
    config.s = doc.get_double_or("", "s", 2.0);
    config.p = doc.get_double_or("", "p", 2.0);
    config.kernel_nodes = doc.get_int_or("", "kernel_nodes", config.kernel_nodes);
    config.duhamel_nodes = doc.get_int_or("", "duhamel_nodes", config.duhamel_nodes);
    config.force = doc.get_bool_or("", "force", false);

    NonlinearControls controls;
    controls.tol_fp = doc.get_double_or("", "tol_fp", controls.tol_fp);
    controls.time_nodes = doc.get_int_or("", "time_nodes", controls.time_nodes);
    controls.c0 = doc.get_double_or("", "c0", controls.c0);
    controls.c1 = doc.get_double_or("", "c1", controls.c1);
    controls.blowup_ceiling = doc.get_double_or("", "blowup_ceiling", controls.blowup_ceiling);
    controls.max_windows = doc.get_int_or("", "max_windows", controls.max_windows);
    controls.window_cap = doc.get_double_or("", "window_cap", controls.window_cap);

    std::vector<double> output_times{horizon};
    if (doc.has("", "output_times")) output_times = doc.get_double_list("", "output_times");

    LoadedProblem out{grid,
                      symbols,
                      alpha,
                      beta,
                      load_data_field(doc, "phi", grid, base_dir),
                      load_data_field(doc, "psi", grid, base_dir),
                      load_source(doc, grid, base_dir),
                      horizon,
                      output_times,
                      config,
                      std::nullopt,
                      controls};
    if (doc.has("", "nonlinearity")) out.nonlinearity = doc.get("", "nonlinearity");
    return out;
}

namespace {

void put_u32_le(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32_le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64_le(std::ostream& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64_le(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace

void write_snapshot(const std::string& path, const SpectralField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write("BQF1", 4);
    const unsigned char dim = static_cast<unsigned char>(field.grid().dim());
    out.write(reinterpret_cast<const char*>(&dim), 1);
    for (int d = 0; d < field.grid().dim(); ++d)
        put_u32_le(out, static_cast<std::uint32_t>(field.grid().points()[d]));
    for (const Complex& v : field.values()) {
        put_f64_le(out, v.real());
        put_f64_le(out, v.imag());
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

RawSnapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "BQF1", 4) != 0)
        throw std::runtime_error("not a BQF1 snapshot: " + path);
    unsigned char dim = 0;
    in.read(reinterpret_cast<char*>(&dim), 1);
    RawSnapshot snap;
    snap.n = dim;
    std::size_t total = 1;
    for (int d = 0; d < snap.n; ++d) {
        snap.points.push_back(static_cast<int>(get_u32_le(in)));
        total *= static_cast<std::size_t>(snap.points.back());
    }
    snap.values.resize(total);
    for (auto& v : snap.values) {
        const double re = get_f64_le(in);
        const double im = get_f64_le(in);
        v = Complex{re, im};
    }
    if (!in) throw std::runtime_error("truncated snapshot: " + path);
    return snap;
}

void write_norms_csv(const std::string& path, const std::vector<double>& times,
                     const std::vector<SpectralField>& u, const std::vector<SpectralField>& ut,
                     double s, double p) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "t,linf_u,lp_u,ysp_u,linf_ut,lp_ut,ysp_ut\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const NormSuite norms(u[i].grid(), s, p);
        out << times[i] << ',' << norms.linf(u[i]) << ',' << norms.lp(u[i]) << ','
            << norms.ysp(u[i]) << ',' << norms.linf(ut[i]) << ',' << norms.lp(ut[i]) << ','
            << norms.ysp(ut[i]) << '\n';
    }
}

void write_diagnostics_csv(const std::string& path, const LinearSolution& sol) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << std::setprecision(17);
    out << "residual_u,residual_ut,min_abs_det\n";
    out << sol.residual_u << ',' << sol.residual_ut << ',' << sol.min_abs_det << '\n';
}

void write_run_csv(const std::string& path, const NonlinearRun& run) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << std::setprecision(17);
    out << "window,t_start,length,iterations,final_ratio,monitor\n";
    for (const auto& w : run.windows)
        out << w.index << ',' << w.t_start << ',' << w.length << ',' << w.iterations << ','
            << w.final_ratio << ',' << w.monitor_end << '\n';
}

void write_termination_record(const std::string& path, const NonlinearRun& run) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << std::setprecision(17);
    out << "reason = " << to_string(run.reason) << "\n";
    out << "reached_time = " << run.reached_time << "\n";
    out << "windows = " << run.windows.size() << "\n";
    out << "monitor_max = " << run.monitor_max << "\n";
    if (run.blowup_time) out << "blowup_time = " << *run.blowup_time << "\n";
}

}  // namespace bqs
