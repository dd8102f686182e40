#include "dlp/store.hpp"

#include "dlp/errors.hpp"
#include "dlp/numfmt.hpp"

#include <nlohmann/json.hpp>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dlp {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr std::string_view kRecordsHeader = "user_id,date,duration_min";

bool is_unreserved(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

void write_file_atomic(const fs::path& target, const std::string& content) {
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IOFailure("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw IOFailure("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        throw IOFailure("rename " + tmp.string() + " -> " + target.string() + ": " +
                        ec.message());
    }
}

double require_number(const ordered_json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_number()) {
        throw CorruptFile(std::string("model JSON: missing or non-numeric '") + key + "'");
    }
    return doc[key].get<double>();
}

std::string require_string(const ordered_json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_string()) {
        throw CorruptFile(std::string("model JSON: missing or non-string '") + key + "'");
    }
    return doc[key].get<std::string>();
}

std::vector<double> require_array(const ordered_json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_array()) {
        throw CorruptFile(std::string("model JSON: missing or non-array '") + key + "'");
    }
    std::vector<double> out;
    for (const auto& v : doc[key]) {
        if (!v.is_number()) {
            throw CorruptFile(std::string("model JSON: non-numeric entry in '") + key + "'");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

StoreLock::StoreLock(const fs::path& root) {
    const fs::path lock_path = root / ".lock";
    fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) {
        throw IOFailure("cannot open lock file " + lock_path.string() + ": " +
                        std::strerror(errno));
    }
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw StoreLocked("store lock held by another process: " + lock_path.string());
    }
}

StoreLock::~StoreLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

Store::Store(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) {
        throw IOFailure("cannot create store root " + root_.string() + ": " + ec.message());
    }
    fs::create_directories(models_dir(), ec);
    if (ec) {
        throw IOFailure("cannot create models dir: " + ec.message());
    }
}

fs::path Store::model_path(const std::string& user_id) const {
    return models_dir() / (encode_user_id(user_id) + ".json");
}

std::size_t Store::append_records(const std::vector<AccessRecord>& records) {
    const bool fresh = !fs::exists(records_path()) || fs::file_size(records_path()) == 0;
    std::ofstream out(records_path(), std::ios::binary | std::ios::app);
    if (!out) {
        throw IOFailure("cannot open " + records_path().string() + " for append");
    }
    if (fresh) {
        out << kRecordsHeader << '\n';
    }
    for (const auto& r : records) {
        out << r.user_id << ',' << format_date(r.date) << ','
            << format_double(r.duration_min) << '\n';
    }
    out.flush();
    if (!out) {
        throw IOFailure("short append to " + records_path().string());
    }
    return records.size();
}

std::vector<AccessRecord> Store::load_records() const {
    if (!fs::exists(records_path())) {
        return {};
    }
    std::ifstream in(records_path(), std::ios::binary);
    if (!in) {
        throw IOFailure("cannot open " + records_path().string());
    }
    auto parsed = parse_records(in, InputFormat::CSV);
    return std::move(parsed.records);
}

std::string stored_model_to_json(const StoredModel& stored) {
    const TrendModel& m = stored.model;
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["user_id"] = m.user_id;
    doc["granularity"] = std::string(granularity_name(m.granularity));
    doc["origin"] = format_date(m.origin);
    doc["n_train"] = m.n_train;
    doc["k"] = m.k;
    doc["m_offset"] = m.m_offset;
    doc["changepoints"] = m.changepoints;
    doc["delta"] = m.delta;
    doc["gamma"] = m.gamma;
    doc["lambda"] = m.lambda;
    doc["alpha"] = stored.band.alpha;
    doc["varsigma"] = stored.band.varsigma;
    doc["mu"] = stored.mu;
    doc["sigma"] = stored.sigma;
    doc["band_mode"] = std::string(band_mode_name(stored.band.mode));
    return doc.dump(2) + "\n";
}

StoredModel stored_model_from_json(const std::string& text) {
    const auto doc = ordered_json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw CorruptFile("model JSON: unparseable document");
    }
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
        throw CorruptFile("model JSON: missing schema_version");
    }
    if (doc["schema_version"].get<int>() != kSchemaVersion) {
        throw SchemaVersionMismatch("model JSON: unsupported schema_version " +
                                    std::to_string(doc["schema_version"].get<int>()));
    }

    StoredModel stored;
    TrendModel& m = stored.model;
    m.user_id = require_string(doc, "user_id");
    const auto gran = parse_granularity(require_string(doc, "granularity"));
    if (!gran) {
        throw CorruptFile("model JSON: unknown granularity");
    }
    m.granularity = *gran;
    const auto origin = parse_date(require_string(doc, "origin"));
    if (!origin) {
        throw CorruptFile("model JSON: invalid origin date");
    }
    m.origin = *origin;
    m.n_train = static_cast<int>(require_number(doc, "n_train"));
    m.k = require_number(doc, "k");
    m.m_offset = require_number(doc, "m_offset");
    m.changepoints = require_array(doc, "changepoints");
    m.delta = require_array(doc, "delta");
    m.gamma = require_array(doc, "gamma");
    m.lambda = require_number(doc, "lambda");
    stored.band.alpha = require_number(doc, "alpha");
    stored.band.varsigma = require_number(doc, "varsigma");
    stored.mu = require_number(doc, "mu");
    stored.sigma = require_number(doc, "sigma");
    const auto mode = parse_band_mode(require_string(doc, "band_mode"));
    if (!mode) {
        throw CorruptFile("model JSON: unknown band_mode");
    }
    stored.band.mode = *mode;

    if (m.changepoints.size() != m.delta.size() || m.delta.size() != m.gamma.size()) {
        throw CorruptFile("model JSON: changepoints/delta/gamma length mismatch");
    }
    return stored;
}

fs::path Store::save_model(const StoredModel& stored) {
    const fs::path path = model_path(stored.model.user_id);
    write_file_atomic(path, stored_model_to_json(stored));
    return path;
}

StoredModel Store::load_model(const std::string& user_id) const {
    const fs::path path = model_path(user_id);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw NotFound("no model for user '" + user_id + "' at " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return stored_model_from_json(buffer.str());
}

std::vector<std::string> Store::list_models() const {
    std::vector<std::string> users;
    if (!fs::exists(models_dir())) {
        return users;
    }
    for (const auto& entry : fs::directory_iterator(models_dir())) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") {
            continue;
        }
        users.push_back(decode_user_id(entry.path().stem().string()));
    }
    std::sort(users.begin(), users.end());
    return users;
}

StoreConfig load_store_config(const Store& store) {
    StoreConfig cfg;
    std::ifstream in(store.config_path(), std::ios::binary);
    if (!in) {
        return cfg;
    }
    const auto doc = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw CorruptFile("config.json: unparseable document");
    }
    const auto get_str = [&](const char* key, std::optional<std::string>& slot) {
        if (doc.contains(key)) {
            if (!doc[key].is_string()) throw CorruptFile(std::string("config.json: '") + key + "' must be a string");
            slot = doc[key].get<std::string>();
        }
    };
    const auto get_num = [&](const char* key, std::optional<double>& slot) {
        if (doc.contains(key)) {
            if (!doc[key].is_number()) throw CorruptFile(std::string("config.json: '") + key + "' must be a number");
            slot = doc[key].get<double>();
        }
    };
    const auto get_int = [&](const char* key, std::optional<int>& slot) {
        if (doc.contains(key)) {
            if (!doc[key].is_number_integer()) throw CorruptFile(std::string("config.json: '") + key + "' must be an integer");
            slot = doc[key].get<int>();
        }
    };
    get_str("granularity", cfg.granularity);
    get_int("changepoints", cfg.changepoints);
    get_num("cp_range", cfg.cp_range);
    get_num("lambda", cfg.lambda);
    get_num("alpha", cfg.alpha);
    get_num("varsigma", cfg.varsigma);
    get_str("band_mode", cfg.band_mode);
    get_num("alert", cfg.alert);
    get_num("restrict", cfg.restrict);
    get_num("block", cfg.block);
    get_int("horizon", cfg.horizon);
    return cfg;
}

std::string encode_user_id(const std::string& user_id) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(user_id.size());
    for (const unsigned char c : user_id) {
        if (is_unreserved(static_cast<char>(c))) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

std::string decode_user_id(const std::string& encoded) {
    std::string out;
    out.reserve(encoded.size());
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        if (encoded[i] == '%' && i + 2 < encoded.size()) {
            const int hi = hex_value(encoded[i + 1]);
            const int lo = hex_value(encoded[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>((hi << 4) | lo));
                i += 2;
                continue;
            }
        }
        out.push_back(encoded[i]);
    }
    return out;
}

} // namespace dlp
