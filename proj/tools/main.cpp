#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <gridsight/image_io.hpp>
#include <gridsight/pipeline.hpp>
#include <gridsight/platform.hpp>
#include <gridsight/version.hpp>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitProcessingError = 2;
constexpr int kExitUsage = 64;

gridsight::MassBudget read_budget_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw gridsight::MissingFileError("cannot open budget file: " + path);
    }
    gridsight::MassBudget budget;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::stringstream ss(line);
        std::string name;
        std::string weight;
        std::string pieces;
        if (!std::getline(ss, name, ',') || !std::getline(ss, weight, ',') || !std::getline(ss, pieces)) {
            throw gridsight::MalformedHeaderError("budget csv: expected name,unit_weight_g,pieces at line " +
                                                  std::to_string(line_no));
        }
        try {
            budget.items.push_back({name, std::stod(weight), std::stoi(pieces)});
        } catch (const std::exception&) {
            if (line_no == 1) {
                continue; // header row
            }
            throw gridsight::MalformedHeaderError("budget csv: bad numbers at line " +
                                                  std::to_string(line_no));
        }
    }
    return budget;
}

std::vector<gridsight::ProposalRegion> read_regions_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw gridsight::MissingFileError("cannot open regions file: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw gridsight::MalformedHeaderError("regions json: " + std::string(e.what()));
    }
    std::vector<gridsight::ProposalRegion> regions;
    for (const json& item : j) {
        gridsight::ProposalRegion r;
        const auto& bbox = item.at("bbox");
        r.x = bbox.at(0).get<int>();
        r.y = bbox.at(1).get<int>();
        r.w = bbox.at(2).get<int>();
        r.h = bbox.at(3).get<int>();
        if (item.contains("subband") && item["subband"] == "horizontal") {
            r.subband = gridsight::DetailSubband::Horizontal;
        }
        if (item.contains("entropy")) {
            r.entropy = item["entropy"].get<double>();
        }
        if (item.contains("nfc_seed")) {
            r.nfc_seed = item["nfc_seed"].get<double>();
        }
        regions.push_back(r);
    }
    return regions;
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridsight - power-grid inspection imagery toolkit"};
    app.set_version_flag("--version", gridsight::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string input_path;
    std::string out_dir = ".";
    app.add_option("--config", config_path, "flat key-value configuration file");

    // flag storage; values reach the config only when explicitly passed
    bool center_included = true;
    double edge_threshold = 0.1;
    double canny_sigma = 1.4;
    double canny_low = 0.1;
    double canny_high = 0.3;
    int hough_votes = 0;
    int gabor_orients = 6;
    std::vector<double> gabor_waves;
    double mpp = 0.05;
    int n_points = 5;
    int gr_th = 100;
    int min_th = 80;
    int max_th = 150;
    std::string wavelet = "haar";
    double emax = 0.05;
    int max_regions = 16;
    int max_radius = 32;
    int min_region_px = 64;

    auto* thermal = app.add_subcommand("thermal", "extract overheated components from a thermal image");
    thermal->add_option("-i,--input", input_path, "thermal image (PNG/PGM/PPM)")->required();
    thermal->add_option("--out", out_dir, "output directory");
    thermal->add_option("--center-included", center_included, "include the center pixel in the 3x3 pre-sum");
    thermal->add_option("--edge-threshold", edge_threshold, "edge exposure threshold in [0,1]");

    auto* structures = app.add_subcommand("structures", "detect tower structure and confine transfer lines");
    structures->add_option("-i,--input", input_path, "aerial image")->required();
    structures->add_option("--out", out_dir, "output directory");
    structures->add_option("--canny-sigma", canny_sigma, "Gaussian sigma");
    structures->add_option("--canny-low", canny_low, "low hysteresis fraction");
    structures->add_option("--canny-high", canny_high, "high hysteresis fraction");
    structures->add_option("--hough-votes", hough_votes, "minimum votes (0 = 0.3 * height)");
    structures->add_option("--gabor-orients", gabor_orients, "orientation count");
    structures->add_option("--gabor-waves", gabor_waves, "wavelengths in pixels")->delimiter(',');

    auto* clearance = app.add_subcommand("clearance", "measure the tree-to-tower clearance corridor");
    clearance->add_option("-i,--input", input_path, "aerial RGB image")->required();
    clearance->add_option("--out", out_dir, "output directory");
    clearance->add_option("--mpp", mpp, "meters per pixel");
    clearance->add_option("--n-points", n_points, "facade point count (odd)");
    clearance->add_option("--gr-th", gr_th, "green channel threshold");
    clearance->add_option("--min-th", min_th, "red/blue lower threshold");
    clearance->add_option("--max-th", max_th, "red/blue upper threshold");
    clearance->add_option("--canny-sigma", canny_sigma, "Gaussian sigma");
    clearance->add_option("--canny-low", canny_low, "low hysteresis fraction");
    clearance->add_option("--canny-high", canny_high, "high hysteresis fraction");
    clearance->add_option("--hough-votes", hough_votes, "minimum votes (0 = 0.3 * height)");

    auto* propose = app.add_subcommand("propose", "DWT-based region proposal");
    propose->add_option("-i,--input", input_path, "input image")->required();
    propose->add_option("--out", out_dir, "output directory");
    propose->add_option("--wavelet", wavelet, "haar or db2")->check(CLI::IsMember({"haar", "db2"}));
    propose->add_option("--emax", emax, "NFC grouping tolerance");
    propose->add_option("--max-regions", max_regions, "regions per subband");
    propose->add_option("--max-radius", max_radius, "ripple growth limit");
    propose->add_option("--min-region-px", min_region_px, "minimum region area");

    auto* train_cmd = app.add_subcommand("train", "train the region classifier");
    std::string data_dir;
    std::string model_out = "model.gscnn";
    gridsight::TrainConfig tc;
    train_cmd->add_option("--data", data_dir, "dataset root (train/test class directories)")->required();
    train_cmd->add_option("--out", model_out, "model output file");
    train_cmd->add_option("--seed", tc.seed, "rng seed");
    train_cmd->add_option("--epochs", tc.epochs, "training epochs");
    train_cmd->add_option("--lr", tc.learning_rate, "learning rate");
    train_cmd->add_option("--batch", tc.batch_size, "mini-batch size");
    train_cmd->add_option("--momentum", tc.momentum, "momentum coefficient");

    auto* classify_cmd = app.add_subcommand("classify", "filter proposals with a trained model");
    std::string model_path;
    std::string regions_path;
    classify_cmd->add_option("--model", model_path, "model file")->required();
    classify_cmd->add_option("--regions", regions_path, "proposals JSON")->required();
    classify_cmd->add_option("-i,--input", input_path, "image the proposals refer to")->required();

    auto* platform = app.add_subcommand("platform", "robot sizing and alignment arithmetic");
    platform->require_subcommand(1);
    auto* thrust = platform->add_subcommand("thrust", "thrust per motor");
    gridsight::ThrustParams tp;
    thrust->add_option("--weight", tp.total_weight_g, "total weight in grams")->required();
    thrust->add_option("--alpha", tp.alpha, "safety factor");
    thrust->add_option("--motors", tp.n_motors, "motor count");
    auto* mass = platform->add_subcommand("mass", "sum a mass budget");
    std::string budget_path;
    mass->add_option("--budget", budget_path, "CSV with name,unit_weight_g,pieces")->required();
    auto* align = platform->add_subcommand("align", "laser-array alignment angle");
    gridsight::LaserReadings lr;
    align->add_option("--d0", lr.distances_m[0], "first reading, meters")->required();
    align->add_option("--d1", lr.distances_m[1], "second reading, meters")->required();
    align->add_option("--d2", lr.distances_m[2], "third reading, meters")->required();
    align->add_option("--spacing", lr.spacing_m, "sensor spacing, meters")->required();

    auto* pipeline = app.add_subcommand("pipeline", "run the full inspection pipeline over a batch");
    std::string pipe_input;
    std::string pipe_model;
    std::uint64_t pipe_seed = 0;
    int pipe_jobs = 0;
    pipeline->add_option("--input", pipe_input, "input image directory");
    pipeline->add_option("--out", out_dir, "output directory");
    pipeline->add_option("--model", pipe_model, "classifier model file");
    pipeline->add_option("--seed", pipe_seed, "top-level rng seed");
    pipeline->add_option("--jobs", pipe_jobs, "worker pool size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return kExitUsage;
    }

    // copies a flag into the config only when it was actually passed,
    // so config-file values survive unset flags
    auto override_if = [](CLI::App* sub, const char* flag, auto& dst, const auto& src) {
        if (sub->count(flag) > 0) {
            dst = src;
        }
    };

    try {
        gridsight::PipelineConfig cfg;
        if (!config_path.empty()) {
            cfg = gridsight::load_config(config_path);
        }
        CLI::App* active = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
        if (active && active->get_option_no_throw("--out") != nullptr) {
            override_if(active, "--out", cfg.out_dir, out_dir);
        }

        if (*thermal) {
            override_if(thermal, "--center-included", cfg.thermal.center_included, center_included);
            override_if(thermal, "--edge-threshold", cfg.thermal.edge_threshold, edge_threshold);
            std::filesystem::create_directories(cfg.out_dir);
            const auto img = gridsight::to_gray(gridsight::load_image(input_path));
            std::cout << gridsight::thermal_stage(cfg, img, stem_of(input_path)).dump(2) << "\n";
        } else if (*structures) {
            override_if(structures, "--canny-sigma", cfg.clearance.canny_sigma, canny_sigma);
            override_if(structures, "--canny-low", cfg.clearance.canny_low, canny_low);
            override_if(structures, "--canny-high", cfg.clearance.canny_high, canny_high);
            override_if(structures, "--hough-votes", cfg.clearance.min_votes, hough_votes);
            override_if(structures, "--gabor-orients", cfg.gabor_orients, gabor_orients);
            override_if(structures, "--gabor-waves", cfg.gabor_waves, gabor_waves);
            std::filesystem::create_directories(cfg.out_dir);
            const auto img = gridsight::to_gray(gridsight::load_image(input_path));
            std::cout << gridsight::structures_stage(cfg, img, stem_of(input_path)).dump(2) << "\n";
        } else if (*clearance) {
            override_if(clearance, "--mpp", cfg.meter_per_pixel, mpp);
            override_if(clearance, "--n-points", cfg.facade_points, n_points);
            override_if(clearance, "--gr-th", cfg.green.gr_th, gr_th);
            override_if(clearance, "--min-th", cfg.green.min_th, min_th);
            override_if(clearance, "--max-th", cfg.green.max_th, max_th);
            override_if(clearance, "--canny-sigma", cfg.clearance.canny_sigma, canny_sigma);
            override_if(clearance, "--canny-low", cfg.clearance.canny_low, canny_low);
            override_if(clearance, "--canny-high", cfg.clearance.canny_high, canny_high);
            override_if(clearance, "--hough-votes", cfg.clearance.min_votes, hough_votes);
            std::filesystem::create_directories(cfg.out_dir);
            const auto img = gridsight::load_image(input_path);
            std::cout << gridsight::clearance_stage(cfg, img, stem_of(input_path)).dump(2) << "\n";
        } else if (*propose) {
            if (propose->count("--wavelet") > 0) {
                cfg.proposal.wavelet = wavelet == "db2" ? gridsight::Wavelet::Db2 : gridsight::Wavelet::Haar;
            }
            override_if(propose, "--emax", cfg.proposal.e_max, emax);
            override_if(propose, "--max-regions", cfg.proposal.max_regions, max_regions);
            override_if(propose, "--max-radius", cfg.proposal.max_radius, max_radius);
            override_if(propose, "--min-region-px", cfg.proposal.min_region_px, min_region_px);
            std::filesystem::create_directories(cfg.out_dir);
            const auto img = gridsight::to_gray(gridsight::load_image(input_path));
            std::cout << gridsight::propose_stage(cfg, img, stem_of(input_path), nullptr).dump(2) << "\n";
        } else if (*train_cmd) {
            if (train_cmd->count("--seed") == 0) {
                tc.seed = cfg.seed;
            }
            const auto data = gridsight::load_dataset(data_dir);
            gridsight::CnnModel model = gridsight::build_model(tc.seed);
            std::vector<double> losses;
            model = gridsight::train(model, data, tc, &losses);
            for (std::size_t i = 0; i < losses.size(); ++i) {
                std::cerr << "epoch " << (i + 1) << " loss " << losses[i] << "\n";
            }
            gridsight::save_model(model, model_out);
            std::size_t correct = 0;
            for (const auto& item : data.test) {
                if (gridsight::classify(model, item.patch).label == item.label) {
                    ++correct;
                }
            }
            json j{{"model", model_out},
                   {"train_size", data.train.size()},
                   {"test_size", data.test.size()},
                   {"test_accuracy",
                    data.test.empty() ? 0.0 : static_cast<double>(correct) / data.test.size()}};
            std::cout << j.dump(2) << "\n";
        } else if (*classify_cmd) {
            const auto model = gridsight::load_model(model_path);
            const auto regions = read_regions_json(regions_path);
            const auto img = gridsight::to_gray(gridsight::load_image(input_path));
            std::cout << gridsight::classify_stage(model, regions, img).dump(2) << "\n";
        } else if (*platform) {
            if (*thrust) {
                std::printf("%.2f\n", gridsight::thrust_per_motor(tp));
            } else if (*mass) {
                std::printf("%.2f\n", gridsight::total_mass(read_budget_csv(budget_path)));
            } else if (*align) {
                std::printf("%.6f\n", gridsight::alignment_angle(lr));
            }
        } else if (*pipeline) {
            override_if(pipeline, "--input", cfg.input_dir, pipe_input);
            override_if(pipeline, "--seed", cfg.seed, pipe_seed);
            if (pipeline->count("--model") > 0) {
                cfg.model_path = pipe_model;
                cfg.classify_enabled = true;
            }
            if (pipe_jobs > 0) {
                cfg.jobs = pipe_jobs;
            }
            const gridsight::PipelineResult result = gridsight::run_pipeline(cfg);
            std::cout << result.report.dump(2) << "\n";
            return result.exit_code;
        }
    } catch (const gridsight::IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const gridsight::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const gridsight::Error& e) {
        std::cerr << "processing error: " << e.what() << "\n";
        return kExitProcessingError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitProcessingError;
    }
    return kExitOk;
}
