#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgv {

struct FetchError : std::runtime_error {
    enum class Code {
        NotFound,     // no candidate URL served the matrix
        Network,      // transport failure (includes cache miss while offline)
        Invalid,      // downloaded bytes failed to parse
        HashMismatch, // re-fetched content differs from the recorded hash
    };

    FetchError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
    Code code;
};

/// Minimal HTTP(S) GET abstraction so the fetch pipeline can be exercised
/// with injected fakes.
class Transport {
public:
    virtual ~Transport() = default;
    /// Returns the response body. Throws FetchError(NotFound) on 404 and
    /// FetchError(Network) on any other failure.
    virtual std::string get(const std::string& url) = 0;
};

std::unique_ptr<Transport> make_https_transport();

inline constexpr const char* kDefaultBaseUrl = "https://math.nist.gov/pub/MatrixMarket2";

/// Candidate URLs for a matrix name under a base URL: the known collection
/// layout first, then flat "<name>.mtx.gz" and "<name>.mtx".
std::vector<std::string> matrix_url_candidates(const std::string& base_url,
                                               const std::string& name);

/// Returns the path of "<name>.mtx" inside cache_dir, downloading it first
/// when missing. Downloads are gunzipped if needed, validated by parsing,
/// and recorded with a content hash; a warm cache never touches the network.
std::filesystem::path fetch_matrix(const std::string& name,
                                   const std::filesystem::path& cache_dir, Transport& transport,
                                   const std::string& base_url = kDefaultBaseUrl,
                                   bool force_refetch = false);

std::string sha256_hex(const std::string& bytes);
bool looks_gzipped(const std::string& bytes);
std::string gunzip(const std::string& bytes);

} // namespace cgv
