#pragma once

#include "medsplat/pdgc.hpp"
#include "medsplat/trainer.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace medsplat::io {

namespace fs = std::filesystem;

// ---- camera records: text key-value, canonical float printing ----
void write_camera(const fs::path& path, const Camera& camera);
Camera read_camera(const fs::path& path);

// ---- point clouds: ASCII PLY with x y z red green blue ----
void write_ply(const fs::path& path, const std::vector<PointRecord>& points);
std::vector<PointRecord> read_ply(const fs::path& path);

// ---- depth maps: PFM, grayscale, little-endian (scale -1.0) ----
void write_pfm(const fs::path& path, const Image& map);
Image read_pfm(const fs::path& path);

// ---- float sidecars: raw little-endian float32 with a small header ----
void write_f32(const fs::path& path, const Image& image);
Image read_f32(const fs::path& path);

// ---- PNG, 8-bit, for inspection only (never feeds metrics) ----
void write_png(const fs::path& path, const Image& image);

// ---- dataset manifest ----
struct ManifestView {
    std::string id;
    std::string split;  // "train" | "test"
    std::string camera_path;
    std::string degraded_path;
    std::string clean_path;        // optional, empty if absent
    std::string depth_path;        // optional
    std::string pseudo_depth_path; // optional
};

struct PresetRecord {
    std::string name;
    Vec3 c_med = Vec3::Zero();
    Vec3 sigma_att = Vec3::Zero();
    Vec3 sigma_bs = Vec3::Zero();
};

struct DatasetManifest {
    int version = 1;
    Bounds bounds;
    std::string points_path;
    std::optional<PresetRecord> preset;
    std::optional<PresetRecord> preset_blend_to;
    std::vector<ManifestView> views;
};

void write_manifest(const fs::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const fs::path& path);

struct LoadOptions {
    bool invert_pseudo_depth = false;  // ingest disparity-style files
};

// Resolve the manifest into in-memory training data (targets from float
// sidecars; PNGs never feed training or metrics).
TrainDataset load_dataset(const fs::path& manifest_path, const LoadOptions& opts = {});

// ---- checkpoints: JSON header + raw little-endian float64 blobs ----
void save_checkpoint(const fs::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const fs::path& path);

}  // namespace medsplat::io
