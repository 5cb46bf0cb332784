#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include <gridsight/cnn.hpp>
#include <gridsight/proposal.hpp>
#include <gridsight/thermal.hpp>
#include <gridsight/vegetation.hpp>

namespace gridsight {

/// Everything the batch front-end needs: stage toggles plus the knobs
/// of every module. Flat `section.key = value` config files feed this;
/// command-line flags override file values.
struct PipelineConfig {
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string input_dir;
    std::string thermal_input; // file or directory; empty disables the thermal pass
    std::string out_dir = ".";
    std::string model_path;

    bool structures_enabled = true;
    bool clearance_enabled = true;
    bool propose_enabled = true;
    bool classify_enabled = false;

    double meter_per_pixel = 0.05;

    ThermalOptions thermal;
    ClearanceParams clearance; // canny, hough and line-family settings
    int facade_points = 5;
    GreenThresholds green;

    int gabor_orients = 6;
    std::vector<double> gabor_waves = {4.0, 8.0, 16.0, 32.0};
    double gabor_xy_scale = 0.125;
    double tower_threshold = -1.0; // negative selects Otsu

    ProposalParams proposal;

    double train_lr = 0.01;
    int train_epochs = 20;
    int train_batch = 16;
    double train_momentum = 0.9;

    /// Applies one `section.key = value` assignment; unknown keys are
    /// configuration errors.
    void apply(const std::string& key, const std::string& value);

    /// Effective configuration as sorted key/value text, echoed into
    /// reports.
    std::map<std::string, std::string> echo() const;

    void validate_for_pipeline() const;
};

/// Parses a flat key-value config file ('#' starts a comment).
PipelineConfig load_config(const std::string& path);

struct PipelineResult {
    nlohmann::json report;
    int exit_code = 0; // 0 ok, 2 when any image hit a processing error
};

/// Per-stage entry points. Each returns the stage's JSON fragment and
/// writes its artifacts (PNG/JSON) under cfg.out_dir using the stem.
nlohmann::json thermal_stage(const PipelineConfig& cfg, const RasterGray& img, const std::string& stem);
nlohmann::json structures_stage(const PipelineConfig& cfg, const RasterGray& img, const std::string& stem);
nlohmann::json clearance_stage(const PipelineConfig& cfg, const RasterRgb& img, const std::string& stem);
nlohmann::json propose_stage(const PipelineConfig& cfg, const RasterGray& img, const std::string& stem,
                             std::vector<ProposalRegion>* regions_out = nullptr);
nlohmann::json classify_stage(const CnnModel& model, const std::vector<ProposalRegion>& regions,
                              const RasterGray& img);

/// Full batch: structures, clearance, propose and classify per aerial
/// image (thermal separately when a thermal input is configured),
/// aggregated by filename into one schema-versioned report. Also writes
/// <out>/report.json. Re-runs are byte-identical.
PipelineResult run_pipeline(const PipelineConfig& cfg);

/// JSON encoders shared by stages and the CLI.
nlohmann::json to_json(const HoughLine& line);
nlohmann::json to_json(const ClearanceReport& report);
nlohmann::json to_json(const ProposalRegion& region);
nlohmann::json to_json(const ClassifiedRegion& region);

} // namespace gridsight
