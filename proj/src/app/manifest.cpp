#include "xva/app/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "xva/app/io.hpp"

#ifndef XVA_MILD_VERSION
#define XVA_MILD_VERSION "unknown"
#endif

namespace xva::app {

namespace {

constexpr const char* kMarker = "run.incomplete";

class Digest {
public:
    Digest() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw std::runtime_error("sha256 init failed");
        }
    }
    void update(const void* data, std::size_t n) {
        if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw std::runtime_error("sha256 update failed");
    }
    std::string hex() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw std::runtime_error("sha256 final failed");
        std::string out;
        char buf[3];
        for (unsigned int i = 0; i < len; ++i) {
            std::snprintf(buf, sizeof buf, "%02x", md[i]);
            out += buf;
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

} // namespace

std::string sha256_hex(const std::string& bytes) {
    Digest d;
    d.update(bytes.data(), bytes.size());
    return d.hex();
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    Digest d;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        d.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return d.hex();
}

RunDirectory::RunDirectory(std::string dir, std::string command, const nlohmann::json& normalized_config)
    : dir_(std::move(dir)), command_(std::move(command)), config_(normalized_config),
      config_sha_(sha256_hex(normalized_config.dump())), start_(std::chrono::steady_clock::now()) {
    std::filesystem::create_directories(dir_);
    std::filesystem::remove(path("manifest.json"));
    write_text(path(kMarker), "running " + command_ + "\n");
}

std::string RunDirectory::path(const std::string& name) const { return (std::filesystem::path(dir_) / name).string(); }

void RunDirectory::finish(int threads) {
    nlohmann::json outputs = nlohmann::json::object();
    for (const auto& name : outputs_) outputs[name] = sha256_file(path(name));
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    nlohmann::json m{{"command", command_},
                     {"version", XVA_MILD_VERSION},
                     {"config_sha256", config_sha_},
                     {"config", config_},
                     {"seeds", seeds_},
                     {"threads", threads},
                     {"wall_seconds", wall},
                     {"outputs", outputs}};
    for (const auto& item : extra_.items()) m[item.key()] = item.value();
    write_json(path("manifest.json"), m);
    std::filesystem::remove(path(kMarker));
}

void RunDirectory::fail(const std::string& message) const {
    try {
        write_text(path(kMarker), "failed " + command_ + ": " + message + "\n");
    } catch (...) {
    }
}

} // namespace xva::app
