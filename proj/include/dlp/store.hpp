#pragma once

#include "dlp/bands.hpp"
#include "dlp/records.hpp"
#include "dlp/trend.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dlp {

// What save_model persists alongside the fitted trend.
struct StoredModel {
    TrendModel model;
    double mu = 0.0;
    double sigma = 0.0;
    BandConfig band;
};

// Exclusive advisory lock on a store root, released on destruction.
// Mutating commands take it; readers do not need it.
class StoreLock {
public:
    explicit StoreLock(const std::filesystem::path& root);
    ~StoreLock();
    StoreLock(const StoreLock&) = delete;
    StoreLock& operator=(const StoreLock&) = delete;

private:
    int fd_ = -1;
};

// File-backed store: an append-only records.csv, one JSON document per
// fitted user under models/, and an optional config.json.
class Store {
public:
    // Opens an existing store or initialises the directory layout.
    explicit Store(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path records_path() const { return root_ / "records.csv"; }
    std::filesystem::path models_dir() const { return root_ / "models"; }
    std::filesystem::path config_path() const { return root_ / "config.json"; }
    std::filesystem::path model_path(const std::string& user_id) const;

    // Appends records in order and returns how many were written.
    // Existing bytes are never rewritten.
    std::size_t append_records(const std::vector<AccessRecord>& records);

    std::vector<AccessRecord> load_records() const;

    // Atomic write (temp file + rename), fixed key order, round-trip
    // number precision. Saving the same model twice produces identical
    // bytes.
    std::filesystem::path save_model(const StoredModel& stored);

    StoredModel load_model(const std::string& user_id) const;

    // user_ids of every saved model, in ascending order.
    std::vector<std::string> list_models() const;

private:
    std::filesystem::path root_;
};

// Optional per-store defaults read from config.json. Command-line flags
// override these; these override built-in defaults.
struct StoreConfig {
    std::optional<std::string> granularity;
    std::optional<int> changepoints;
    std::optional<double> cp_range;
    std::optional<double> lambda;
    std::optional<double> alpha;
    std::optional<double> varsigma;
    std::optional<std::string> band_mode;
    std::optional<double> alert;
    std::optional<double> restrict;
    std::optional<double> block;
    std::optional<int> horizon;
};

// Empty config when the file does not exist; CorruptFile when it exists
// but cannot be parsed.
StoreConfig load_store_config(const Store& store);

// Filesystem-safe encoding of a user id: alphanumerics pass through,
// everything else becomes %XX.
std::string encode_user_id(const std::string& user_id);
std::string decode_user_id(const std::string& encoded);

// JSON (de)serialization of a stored model, exposed for tests.
std::string stored_model_to_json(const StoredModel& stored);
StoredModel stored_model_from_json(const std::string& text);

} // namespace dlp
