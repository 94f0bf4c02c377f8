// Command-line pipeline driver: degrade / reconstruct / eval / ablate / train.
//
// Every command writes its outputs plus a manifest.cfg capturing the fully
// resolved parameters, and can be re-run with --config <manifest> to
// reproduce those outputs bit for bit. Precedence: explicit flag > value
// from --config > built-in default.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "ppsr/ppsr.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        out += items[i];
    }
    return out;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

// flag > config > default (the variable already holds flag-or-default)
double pick_d(const CLI::Option* o, double v, const ppsr::ConfigMap& c, const std::string& k) {
    return given(o) ? v : c.get_double_or(k, v);
}
long long pick_i(const CLI::Option* o, long long v, const ppsr::ConfigMap& c, const std::string& k) {
    return given(o) ? v : c.get_int_or(k, v);
}
std::uint64_t pick_u(const CLI::Option* o, std::uint64_t v, const ppsr::ConfigMap& c,
                     const std::string& k) {
    return given(o) ? v : c.get_u64_or(k, v);
}
bool pick_b(const CLI::Option* o, bool v, const ppsr::ConfigMap& c, const std::string& k) {
    return given(o) ? v : c.get_bool_or(k, v);
}
std::string pick_s(const CLI::Option* o, const std::string& v, const ppsr::ConfigMap& c,
                   const std::string& k) {
    return given(o) ? v : c.get_or(k, v);
}

void write_text_atomic(const std::string& path, const std::string& text) {
    ppsr::write_file_atomic(path, text.data(), text.size());
}

// ---- shared flag groups ---------------------------------------------------------

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    CLI::Option *o_out = nullptr, *o_seed = nullptr;
    ppsr::ConfigMap cfg;  // loaded from --config, possibly empty
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config_path, "manifest/config file to load defaults from");
    f.o_out = sub->add_option("--out-dir", f.out_dir, "output directory");
    f.o_seed = sub->add_option("--seed", f.seed, "base seed for all randomness");
}

void load_common(CommonFlags& f, const std::string& command) {
    if (!f.config_path.empty()) {
        f.cfg = ppsr::load_config_file(f.config_path);
        const std::string from = f.cfg.get_or("command", command);
        const bool compatible = from == command || (command == "reconstruct" && from == "degrade");
        if (!compatible)
            throw std::runtime_error("config was written by '" + from + "', not usable with '" +
                                     command + "'");
    }
    f.out_dir = pick_s(f.o_out, f.out_dir, f.cfg, "out_dir");
    f.seed = pick_u(f.o_seed, f.seed, f.cfg, "seed");
    fs::create_directories(f.out_dir);
}

struct DegradeFlags {
    std::string kernel = "gaussian";
    int kernel_size = 3;
    double kernel_sigma = 1.0;
    int factor = 2;
    double noise_sigma = 0.0;
    CLI::Option *o_kernel = nullptr, *o_size = nullptr, *o_sigma = nullptr, *o_factor = nullptr,
                *o_noise = nullptr;
};

void add_degrade_flags(CLI::App* sub, DegradeFlags& f, bool with_noise) {
    f.o_kernel = sub->add_option("--kernel", f.kernel, "blur kernel type: gaussian|average");
    f.o_size = sub->add_option("--kernel-size", f.kernel_size, "odd blur kernel size");
    f.o_sigma = sub->add_option("--kernel-sigma", f.kernel_sigma, "gaussian blur sigma");
    f.o_factor = sub->add_option("--factor", f.factor, "downsampling factor");
    if (with_noise)
        f.o_noise = sub->add_option("--noise-sigma", f.noise_sigma, "noise std dev, [0,255] units");
}

ppsr::DegradationSpec merge_degrade(const DegradeFlags& f, const ppsr::ConfigMap& c,
                                    double noise_sigma, std::uint64_t seed) {
    ppsr::DegradationSpec spec;
    spec.kernel_type =
        ppsr::kernel_type_from_string(pick_s(f.o_kernel, f.kernel, c, "degrade.kernel"));
    spec.kernel_size = int(pick_i(f.o_size, f.kernel_size, c, "degrade.kernel_size"));
    spec.kernel_sigma = pick_d(f.o_sigma, f.kernel_sigma, c, "degrade.kernel_sigma");
    spec.factor = int(pick_i(f.o_factor, f.factor, c, "degrade.factor"));
    spec.noise_sigma = noise_sigma;
    spec.seed = seed;
    spec.validate();
    return spec;
}

void manifest_degrade(ppsr::ConfigMap& m, const ppsr::DegradationSpec& spec) {
    m.set("degrade.kernel", ppsr::to_string(spec.kernel_type));
    m.set_int("degrade.kernel_size", spec.kernel_size);
    m.set_double("degrade.kernel_sigma", spec.kernel_sigma);
    m.set_int("degrade.factor", spec.factor);
    m.set_double("degrade.noise_sigma", spec.noise_sigma);
}

struct SolverFlags {
    ppsr::SolverConfig cfg;
    std::string profile;
    CLI::Option *o_profile = nullptr, *o_l1 = nullptr, *o_l2 = nullptr, *o_l3 = nullptr,
                *o_g0 = nullptr, *o_gg = nullptr, *o_lreg = nullptr, *o_outer = nullptr,
                *o_cgmax = nullptr, *o_cgtol = nullptr, *o_jacobi = nullptr;
};

void add_solver_flags(CLI::App* sub, SolverFlags& f) {
    f.o_profile = sub->add_option("--profile", f.profile,
                                  "fidelity profile: v1 (intensity) or v2 (joint)");
    f.o_l1 = sub->add_option("--lambda1", f.cfg.lambda1, "intensity fidelity weight");
    f.o_l2 = sub->add_option("--lambda2", f.cfg.lambda2, "gradient fidelity weight");
    f.o_l3 = sub->add_option("--lambda3", f.cfg.lambda3, "laplacian fidelity weight");
    f.o_g0 = sub->add_option("--gamma0", f.cfg.gamma0, "initial penalty");
    f.o_gg = sub->add_option("--gamma-growth", f.cfg.gamma_growth, "penalty growth per iteration");
    f.o_lreg = sub->add_option("--lambda-reg", f.cfg.lambda_reg, "prior weight");
    f.o_outer = sub->add_option("--outer-iters", f.cfg.outer_iters, "outer iterations");
    f.o_cgmax = sub->add_option("--cg-max-iters", f.cfg.cg_max_iters, "max CG iterations");
    f.o_cgtol = sub->add_option("--cg-tol", f.cfg.cg_tol, "CG relative residual tolerance");
    f.o_jacobi = sub->add_flag("--jacobi", f.cfg.use_jacobi, "use the Jacobi preconditioner");
}

ppsr::SolverConfig merge_solver(const SolverFlags& f, const ppsr::ConfigMap& c) {
    ppsr::SolverConfig s = f.cfg;  // flag values or defaults
    s.lambda1 = c.get_double_or("solver.lambda1", s.lambda1);
    s.lambda2 = c.get_double_or("solver.lambda2", s.lambda2);
    s.lambda3 = c.get_double_or("solver.lambda3", s.lambda3);
    if (given(f.o_profile)) ppsr::apply_profile(s, f.profile);
    if (given(f.o_l1)) s.lambda1 = f.cfg.lambda1;
    if (given(f.o_l2)) s.lambda2 = f.cfg.lambda2;
    if (given(f.o_l3)) s.lambda3 = f.cfg.lambda3;
    s.gamma0 = pick_d(f.o_g0, s.gamma0, c, "solver.gamma0");
    s.gamma_growth = pick_d(f.o_gg, s.gamma_growth, c, "solver.gamma_growth");
    s.lambda_reg = pick_d(f.o_lreg, s.lambda_reg, c, "solver.lambda_reg");
    s.outer_iters = int(pick_i(f.o_outer, s.outer_iters, c, "solver.outer_iters"));
    s.cg_max_iters = int(pick_i(f.o_cgmax, s.cg_max_iters, c, "solver.cg_max_iters"));
    s.cg_tol = pick_d(f.o_cgtol, s.cg_tol, c, "solver.cg_tol");
    s.use_jacobi = pick_b(f.o_jacobi, s.use_jacobi, c, "solver.use_jacobi");
    s.validate();
    return s;
}

void manifest_solver(ppsr::ConfigMap& m, const ppsr::SolverConfig& s) {
    m.set_double("solver.lambda1", s.lambda1);
    m.set_double("solver.lambda2", s.lambda2);
    m.set_double("solver.lambda3", s.lambda3);
    m.set_double("solver.gamma0", s.gamma0);
    m.set_double("solver.gamma_growth", s.gamma_growth);
    m.set_double("solver.lambda_reg", s.lambda_reg);
    m.set_int("solver.outer_iters", s.outer_iters);
    m.set_int("solver.cg_max_iters", s.cg_max_iters);
    m.set_double("solver.cg_tol", s.cg_tol);
    m.set_bool("solver.use_jacobi", s.use_jacobi);
}

struct DenoiserFlags {
    std::string kind = "tv";
    std::string model_path;
    double smooth_scale = 0.1;
    double tv_weight_scale = 1.0;
    int tv_iters = 30;
    double tv_step = 0.248;
    CLI::Option *o_kind = nullptr, *o_model = nullptr, *o_smooth = nullptr, *o_tvw = nullptr,
                *o_tvi = nullptr, *o_tvs = nullptr;
};

void add_denoiser_flags(CLI::App* sub, DenoiserFlags& f) {
    f.o_kind = sub->add_option("--denoiser", f.kind, "identity|gauss|tv|cnn");
    f.o_model = sub->add_option("--model", f.model_path, "trained model file (cnn denoiser)");
    f.o_smooth = sub->add_option("--smooth-scale", f.smooth_scale,
                                 "gaussian denoiser: spatial width per unit sigma");
    f.o_tvw = sub->add_option("--tv-weight-scale", f.tv_weight_scale,
                              "tv denoiser: weight multiplier on sigma^2");
    f.o_tvi = sub->add_option("--tv-iters", f.tv_iters, "tv denoiser: dual iterations");
    f.o_tvs = sub->add_option("--tv-step", f.tv_step, "tv denoiser: dual step size");
}

struct MergedDenoiser {
    ppsr::DenoiserHandle handle;
    std::string kind_name;  // canonical
    std::string model_path;
};

MergedDenoiser merge_denoiser(const DenoiserFlags& f, const ppsr::ConfigMap& c) {
    MergedDenoiser out;
    const std::string kind = pick_s(f.o_kind, f.kind, c, "denoiser.kind");
    out.handle.kind = ppsr::denoiser_kind_from_string(kind);
    out.kind_name = ppsr::to_string(out.handle.kind);
    out.handle.smooth_scale = pick_d(f.o_smooth, f.smooth_scale, c, "denoiser.smooth_scale");
    out.handle.tv_weight_scale = pick_d(f.o_tvw, f.tv_weight_scale, c, "denoiser.tv_weight_scale");
    out.handle.tv_iters = int(pick_i(f.o_tvi, f.tv_iters, c, "denoiser.tv_iters"));
    out.handle.tv_step = pick_d(f.o_tvs, f.tv_step, c, "denoiser.tv_step");
    out.model_path = pick_s(f.o_model, f.model_path, c, "denoiser.model");
    if (out.handle.kind == ppsr::DenoiserKind::cnn) {
        if (out.model_path.empty())
            throw std::runtime_error("cnn denoiser requires --model <file>");
        out.handle.model =
            std::make_shared<const ppsr::CnnModel>(ppsr::load_model(out.model_path));
    }
    return out;
}

void manifest_denoiser(ppsr::ConfigMap& m, const MergedDenoiser& d) {
    m.set("denoiser.kind", d.kind_name);
    m.set_double("denoiser.smooth_scale", d.handle.smooth_scale);
    m.set_double("denoiser.tv_weight_scale", d.handle.tv_weight_scale);
    m.set_int("denoiser.tv_iters", d.handle.tv_iters);
    m.set_double("denoiser.tv_step", d.handle.tv_step);
    if (!d.model_path.empty()) m.set("denoiser.model", d.model_path);
}

// ---- subcommands ---------------------------------------------------------------

struct DegradeCmd {
    CommonFlags common;
    DegradeFlags deg;
    std::string input;
    CLI::Option* o_input = nullptr;

    void run() {
        load_common(common, "degrade");
        input = pick_s(o_input, input, common.cfg, "input");
        if (input.empty()) throw std::runtime_error("degrade: missing --input");
        const double noise =
            pick_d(deg.o_noise, deg.noise_sigma, common.cfg, "degrade.noise_sigma");
        const ppsr::DegradationSpec spec = merge_degrade(deg, common.cfg, noise, common.seed);

        const ppsr::Image hr = ppsr::load_image(input);
        const ppsr::Image lr = ppsr::degrade(hr, spec);
        ppsr::save_image(lr, common.out_dir + "/lr.pgm");

        ppsr::ConfigMap m;
        m.set("command", "degrade");
        m.set("input", input);
        m.set("out_dir", common.out_dir);
        m.set_u64("seed", common.seed);
        manifest_degrade(m, spec);
        ppsr::save_config_file(m, common.out_dir + "/manifest.cfg");
        std::cout << "wrote " << common.out_dir << "/lr.pgm (" << lr.width() << "x" << lr.height()
                  << ")\n";
    }
};

struct ReconstructCmd {
    CommonFlags common;
    DegradeFlags deg;
    SolverFlags sol;
    DenoiserFlags den;
    std::string input;
    CLI::Option* o_input = nullptr;

    void run() {
        load_common(common, "reconstruct");
        // A degrade manifest records its own HR input; only reuse the recorded
        // input path when the manifest really is a reconstruct manifest.
        const bool cfg_is_reconstruct = common.cfg.get_or("command", "reconstruct") == "reconstruct";
        if (!given(o_input)) {
            if (cfg_is_reconstruct && common.cfg.has("input"))
                input = common.cfg.get("input");
            else if (!cfg_is_reconstruct && common.cfg.has("out_dir"))
                input = common.cfg.get("out_dir") + "/lr.pgm";
        }
        if (input.empty()) throw std::runtime_error("reconstruct: missing --input");

        const ppsr::DegradationSpec dspec = merge_degrade(deg, common.cfg, 0.0, common.seed);
        const ppsr::SolverConfig scfg = merge_solver(sol, common.cfg);
        const MergedDenoiser dn = merge_denoiser(den, common.cfg);

        const ppsr::Image lr = ppsr::load_image(input);
        const ppsr::OperatorSpec op = ppsr::operator_spec_for(dspec, lr.height() * dspec.factor,
                                                              lr.width() * dspec.factor);
        const ppsr::ReconstructResult res = ppsr::reconstruct(lr, op, scfg, dn.handle);
        ppsr::save_image(res.x, common.out_dir + "/sr.pgm");
        write_text_atomic(common.out_dir + "/trace.csv", ppsr::trace_to_csv(res.trace));

        ppsr::ConfigMap m;
        m.set("command", "reconstruct");
        m.set("input", input);
        m.set("out_dir", common.out_dir);
        m.set_u64("seed", common.seed);
        m.set("degrade.kernel", ppsr::to_string(dspec.kernel_type));
        m.set_int("degrade.kernel_size", dspec.kernel_size);
        m.set_double("degrade.kernel_sigma", dspec.kernel_sigma);
        m.set_int("degrade.factor", dspec.factor);
        manifest_solver(m, scfg);
        manifest_denoiser(m, dn);
        ppsr::save_config_file(m, common.out_dir + "/manifest.cfg");
        std::cout << "wrote " << common.out_dir << "/sr.pgm (" << res.x.width() << "x"
                  << res.x.height() << "), trace.csv with " << res.trace.records.size()
                  << " rows\n";
    }
};

struct EvalCmd {
    CommonFlags common;
    std::string reference, estimate;
    double error_map_scale = 50.0;
    CLI::Option *o_ref = nullptr, *o_est = nullptr, *o_scale = nullptr;

    void run() {
        load_common(common, "eval");
        reference = pick_s(o_ref, reference, common.cfg, "reference");
        estimate = pick_s(o_est, estimate, common.cfg, "estimate");
        if (reference.empty() || estimate.empty())
            throw std::runtime_error("eval: need --reference and --estimate");
        error_map_scale = pick_d(o_scale, error_map_scale, common.cfg, "eval.error_map_scale");

        const ppsr::Image ref = ppsr::load_image(reference);
        const ppsr::Image est = ppsr::load_image(estimate);
        const double p = ppsr::psnr(ref, est);
        const double s = ppsr::ssim(ref, est);
        const ppsr::ErrorStats stats = ppsr::error_stats(ref, est);

        const std::string line = fmt_double(p) + "," + fmt_double(s) + "," +
                                 fmt_double(stats.max_abs) + "," + fmt_double(stats.mean_abs) +
                                 "," + fmt_double(stats.var_abs);
        const std::string csv = "psnr,ssim,max,mean,var\n" + line + "\n";
        write_text_atomic(common.out_dir + "/metrics.csv", csv);
        ppsr::save_image(ppsr::error_map(ref, est, error_map_scale),
                         common.out_dir + "/error_map.pgm");

        ppsr::ConfigMap m;
        m.set("command", "eval");
        m.set("reference", reference);
        m.set("estimate", estimate);
        m.set("out_dir", common.out_dir);
        m.set_u64("seed", common.seed);
        m.set_double("eval.error_map_scale", error_map_scale);
        ppsr::save_config_file(m, common.out_dir + "/manifest.cfg");
        std::cout << "psnr,ssim,max,mean,var\n" << line << "\n";
    }
};

struct AblateCmd {
    CommonFlags common;
    DegradeFlags deg;
    SolverFlags sol;
    DenoiserFlags den;
    std::vector<std::string> images;
    std::string kernels = "gaussian,average";
    std::string noise_sigmas = "1,3,5";
    CLI::Option *o_images = nullptr, *o_kernels = nullptr, *o_sigmas = nullptr;

    void run() {
        load_common(common, "ablate");
        if (!given(o_images) && common.cfg.has("images"))
            images = split_list(common.cfg.get("images"));
        if (images.empty()) throw std::runtime_error("ablate: need --images");
        kernels = pick_s(o_kernels, kernels, common.cfg, "ablate.kernels");
        noise_sigmas = pick_s(o_sigmas, noise_sigmas, common.cfg, "ablate.noise_sigmas");

        const std::vector<std::string> kernel_names = split_list(kernels);
        std::vector<double> sigmas;
        for (const std::string& s : split_list(noise_sigmas)) sigmas.push_back(std::stod(s));
        if (kernel_names.empty() || sigmas.empty())
            throw std::runtime_error("ablate: empty kernel or noise grid");

        ppsr::SolverConfig base = merge_solver(sol, common.cfg);
        const MergedDenoiser dn = merge_denoiser(den, common.cfg);
        ppsr::SolverConfig v1 = base, v2 = base;
        ppsr::apply_profile(v1, "v1");
        ppsr::apply_profile(v2, "v2");

        const int kernel_size = int(pick_i(deg.o_size, deg.kernel_size, common.cfg,
                                           "degrade.kernel_size"));
        const double kernel_sigma =
            pick_d(deg.o_sigma, deg.kernel_sigma, common.cfg, "degrade.kernel_sigma");
        const int factor = int(pick_i(deg.o_factor, deg.factor, common.cfg, "degrade.factor"));

        std::string table = "image,kernel,noise_sigma,psnr_v1,ssim_v1,psnr_v2,ssim_v2\n";
        std::string errors =
            "image,kernel,noise_sigma,max_v1,mean_v1,var_v1,max_v2,mean_v2,var_v2\n";
        int psnr_v1_wins = 0, psnr_v2_wins = 0, psnr_ties = 0;
        int ssim_v1_wins = 0, ssim_v2_wins = 0, ssim_ties = 0;
        int mean_v1_wins = 0, mean_v2_wins = 0, mean_ties = 0;

        for (const std::string& path : images) {
            const std::string name = fs::path(path).filename().string();
            const ppsr::Image full = ppsr::load_image(path);
            const ppsr::Image hr = ppsr::crop_to_multiple(full, factor);
            for (const std::string& kname : kernel_names) {
                for (double ns : sigmas) {
                    ppsr::DegradationSpec dspec;
                    dspec.kernel_type = ppsr::kernel_type_from_string(kname);
                    dspec.kernel_size = kernel_size;
                    dspec.kernel_sigma = kernel_sigma;
                    dspec.factor = factor;
                    dspec.noise_sigma = ns;
                    std::string cell_key = name + "|" + kname + "|" + fmt_double(ns) + "|" +
                                           std::to_string(common.seed);
                    dspec.seed = ppsr::fnv1a64(cell_key);
                    dspec.validate();

                    const ppsr::Image y = ppsr::degrade(hr, dspec);
                    const ppsr::OperatorSpec op =
                        ppsr::operator_spec_for(dspec, hr.height(), hr.width());
                    const ppsr::Image x1 = ppsr::reconstruct(y, op, v1, dn.handle).x;
                    const ppsr::Image x2 = ppsr::reconstruct(y, op, v2, dn.handle).x;

                    const double p1 = ppsr::psnr(hr, x1), p2 = ppsr::psnr(hr, x2);
                    const double s1 = ppsr::ssim(hr, x1), s2 = ppsr::ssim(hr, x2);
                    const ppsr::ErrorStats e1 = ppsr::error_stats(hr, x1);
                    const ppsr::ErrorStats e2 = ppsr::error_stats(hr, x2);

                    table += name + "," + kname + "," + fmt_double(ns) + "," + fmt_double(p1) +
                             "," + fmt_double(s1) + "," + fmt_double(p2) + "," + fmt_double(s2) +
                             "\n";
                    errors += name + "," + kname + "," + fmt_double(ns) + "," +
                              fmt_double(e1.max_abs) + "," + fmt_double(e1.mean_abs) + "," +
                              fmt_double(e1.var_abs) + "," + fmt_double(e2.max_abs) + "," +
                              fmt_double(e2.mean_abs) + "," + fmt_double(e2.var_abs) + "\n";

                    if (p2 > p1) ++psnr_v2_wins;
                    else if (p1 > p2) ++psnr_v1_wins;
                    else ++psnr_ties;
                    if (s2 > s1) ++ssim_v2_wins;
                    else if (s1 > s2) ++ssim_v1_wins;
                    else ++ssim_ties;
                    if (e2.mean_abs < e1.mean_abs) ++mean_v2_wins;
                    else if (e1.mean_abs < e2.mean_abs) ++mean_v1_wins;
                    else ++mean_ties;
                }
            }
        }

        std::string summary = "metric,v1_wins,v2_wins,ties\n";
        summary += "psnr," + std::to_string(psnr_v1_wins) + "," + std::to_string(psnr_v2_wins) +
                   "," + std::to_string(psnr_ties) + "\n";
        summary += "ssim," + std::to_string(ssim_v1_wins) + "," + std::to_string(ssim_v2_wins) +
                   "," + std::to_string(ssim_ties) + "\n";
        summary += "mean_abs," + std::to_string(mean_v1_wins) + "," +
                   std::to_string(mean_v2_wins) + "," + std::to_string(mean_ties) + "\n";

        write_text_atomic(common.out_dir + "/ablation.csv", table);
        write_text_atomic(common.out_dir + "/errors.csv", errors);
        write_text_atomic(common.out_dir + "/summary.csv", summary);

        ppsr::ConfigMap m;
        m.set("command", "ablate");
        m.set("images", join_list(images));
        m.set("out_dir", common.out_dir);
        m.set_u64("seed", common.seed);
        m.set("ablate.kernels", join_list(kernel_names));
        {
            std::vector<std::string> ss;
            for (double s : sigmas) ss.push_back(fmt_double(s));
            m.set("ablate.noise_sigmas", join_list(ss));
        }
        m.set_int("degrade.kernel_size", kernel_size);
        m.set_double("degrade.kernel_sigma", kernel_sigma);
        m.set_int("degrade.factor", factor);
        manifest_solver(m, base);
        manifest_denoiser(m, dn);
        ppsr::save_config_file(m, common.out_dir + "/manifest.cfg");
        std::cout << summary;
    }
};

struct TrainCmd {
    CommonFlags common;
    std::vector<std::string> images;
    ppsr::TrainConfig tc = ppsr::desk_train_config();
    std::string channels = "16,32,32,32,32";
    CLI::Option *o_images = nullptr, *o_patch = nullptr, *o_batch = nullptr, *o_epochs = nullptr,
                *o_steps = nullptr, *o_lr = nullptr, *o_nmin = nullptr, *o_nmax = nullptr,
                *o_channels = nullptr, *o_ksize = nullptr;

    void run() {
        load_common(common, "train");
        if (!given(o_images) && common.cfg.has("images"))
            images = split_list(common.cfg.get("images"));
        if (images.empty()) throw std::runtime_error("train: need --images");

        tc.patch_size = int(pick_i(o_patch, tc.patch_size, common.cfg, "train.patch_size"));
        tc.batch_size = int(pick_i(o_batch, tc.batch_size, common.cfg, "train.batch_size"));
        tc.epochs = int(pick_i(o_epochs, tc.epochs, common.cfg, "train.epochs"));
        tc.steps_per_epoch =
            int(pick_i(o_steps, tc.steps_per_epoch, common.cfg, "train.steps_per_epoch"));
        tc.learning_rate = pick_d(o_lr, tc.learning_rate, common.cfg, "train.learning_rate");
        tc.noise_sigma_min = pick_d(o_nmin, tc.noise_sigma_min, common.cfg, "train.noise_sigma_min");
        tc.noise_sigma_max = pick_d(o_nmax, tc.noise_sigma_max, common.cfg, "train.noise_sigma_max");
        tc.ksize = int(pick_i(o_ksize, tc.ksize, common.cfg, "train.ksize"));
        tc.seed = common.seed;
        const std::string chan = pick_s(o_channels, channels, common.cfg, "train.channels");
        tc.channels.clear();
        for (const std::string& c : split_list(chan)) tc.channels.push_back(std::stoi(c));
        tc.validate();

        std::vector<ppsr::Image> data;
        for (const std::string& p : images) data.push_back(ppsr::load_image(p));
        const ppsr::TrainResult res = ppsr::cnn_train(data, tc);
        ppsr::save_model(res.model, common.out_dir + "/model.bin");

        std::string curve = "epoch,loss\n";
        for (std::size_t e = 0; e < res.epoch_loss.size(); ++e)
            curve += std::to_string(e) + "," + fmt_double(res.epoch_loss[e]) + "\n";
        write_text_atomic(common.out_dir + "/loss_curve.csv", curve);

        ppsr::ConfigMap m;
        m.set("command", "train");
        m.set("images", join_list(images));
        m.set("out_dir", common.out_dir);
        m.set_u64("seed", common.seed);
        m.set_int("train.patch_size", tc.patch_size);
        m.set_int("train.batch_size", tc.batch_size);
        m.set_int("train.epochs", tc.epochs);
        m.set_int("train.steps_per_epoch", tc.steps_per_epoch);
        m.set_double("train.learning_rate", tc.learning_rate);
        m.set_double("train.noise_sigma_min", tc.noise_sigma_min);
        m.set_double("train.noise_sigma_max", tc.noise_sigma_max);
        {
            std::vector<std::string> cs;
            for (int c : tc.channels) cs.push_back(std::to_string(c));
            m.set("train.channels", join_list(cs));
        }
        m.set_int("train.ksize", tc.ksize);
        ppsr::save_config_file(m, common.out_dir + "/manifest.cfg");
        std::cout << "wrote " << common.out_dir << "/model.bin, final epoch loss "
                  << fmt_double(res.epoch_loss.back()) << "\n";
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-image super-resolution pipeline"};
    app.require_subcommand(1);

    DegradeCmd degrade;
    CLI::App* d = app.add_subcommand("degrade", "blur, downsample and add noise to an image");
    add_common(d, degrade.common);
    degrade.o_input = d->add_option("--input", degrade.input, "high-resolution input image");
    add_degrade_flags(d, degrade.deg, true);

    ReconstructCmd rec;
    CLI::App* r = app.add_subcommand("reconstruct", "super-resolve a low-resolution image");
    add_common(r, rec.common);
    rec.o_input = r->add_option("--input", rec.input, "low-resolution input image");
    add_degrade_flags(r, rec.deg, false);
    add_solver_flags(r, rec.sol);
    add_denoiser_flags(r, rec.den);

    EvalCmd eval;
    CLI::App* e = app.add_subcommand("eval", "compare an estimate against a reference");
    add_common(e, eval.common);
    eval.o_ref = e->add_option("--reference", eval.reference, "reference image");
    eval.o_est = e->add_option("--estimate", eval.estimate, "estimate image");
    eval.o_scale = e->add_option("--error-map-scale", eval.error_map_scale,
                                 "absolute error mapped to white at this value");

    AblateCmd ablate;
    CLI::App* a = app.add_subcommand("ablate", "compare the v1 and v2 fidelity profiles");
    add_common(a, ablate.common);
    ablate.o_images = a->add_option("--images", ablate.images, "comma-separated image list")
                          ->delimiter(',');
    ablate.o_kernels = a->add_option("--kernels", ablate.kernels, "kernel types to sweep");
    ablate.o_sigmas = a->add_option("--noise-sigmas", ablate.noise_sigmas, "noise levels to sweep");
    add_degrade_flags(a, ablate.deg, false);
    add_solver_flags(a, ablate.sol);
    add_denoiser_flags(a, ablate.den);

    TrainCmd train;
    CLI::App* t = app.add_subcommand("train", "train the denoising network");
    add_common(t, train.common);
    train.o_images = t->add_option("--images", train.images, "comma-separated training images")
                         ->delimiter(',');
    train.o_patch = t->add_option("--patch-size", train.tc.patch_size, "training patch size");
    train.o_batch = t->add_option("--batch-size", train.tc.batch_size, "patches per step");
    train.o_epochs = t->add_option("--epochs", train.tc.epochs, "training epochs");
    train.o_steps = t->add_option("--steps-per-epoch", train.tc.steps_per_epoch, "steps per epoch");
    train.o_lr = t->add_option("--lr", train.tc.learning_rate, "learning rate");
    train.o_nmin = t->add_option("--noise-min", train.tc.noise_sigma_min, "min training noise");
    train.o_nmax = t->add_option("--noise-max", train.tc.noise_sigma_max, "max training noise");
    train.o_channels = t->add_option("--channels", train.channels, "encoder channels, e.g. 16,32");
    train.o_ksize = t->add_option("--ksize", train.tc.ksize, "convolution kernel size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*d) degrade.run();
        if (*r) rec.run();
        if (*e) eval.run();
        if (*a) ablate.run();
        if (*t) train.run();
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
