#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "cgvariants/fetch.hpp"

#include "cgvariants/matrix_market.hpp"

#include <httplib.h>
#include <openssl/evp.h>
#include <zlib.h>

#include <array>
#include <fstream>
#include <map>
#include <sstream>

namespace cgv {

namespace {

// group directories of the classic collection for the bundled problem set
const std::map<std::string, std::string>& collection_groups() {
    static const std::map<std::string, std::string> groups = {
        {"1138_bus", "harwell-boeing/psadmit"},  {"494_bus", "harwell-boeing/psadmit"},
        {"662_bus", "harwell-boeing/psadmit"},   {"685_bus", "harwell-boeing/psadmit"},
        {"bcsstk03", "harwell-boeing/bcsstruc1"},{"bcsstk14", "harwell-boeing/bcsstruc2"},
        {"bcsstk15", "harwell-boeing/bcsstruc2"},{"bcsstk16", "harwell-boeing/bcsstruc2"},
        {"bcsstk17", "harwell-boeing/bcsstruc2"},{"bcsstk18", "harwell-boeing/bcsstruc2"},
        {"bcsstk27", "harwell-boeing/bcsstruc3"},{"bcsstm19", "harwell-boeing/bcsstruc2"},
        {"bcsstm20", "harwell-boeing/bcsstruc2"},{"bcsstm21", "harwell-boeing/bcsstruc2"},
        {"bcsstm22", "harwell-boeing/bcsstruc2"},{"bcsstm23", "harwell-boeing/bcsstruc2"},
        {"bcsstm24", "harwell-boeing/bcsstruc2"},{"bcsstm25", "harwell-boeing/bcsstruc2"},
        {"nos1", "harwell-boeing/lanpro"},       {"nos2", "harwell-boeing/lanpro"},
        {"nos3", "harwell-boeing/lanpro"},       {"nos4", "harwell-boeing/lanpro"},
        {"nos5", "harwell-boeing/lanpro"},       {"nos6", "harwell-boeing/lanpro"},
        {"nos7", "harwell-boeing/lanpro"},       {"s1rmq4m1", "misc/cylshell"},
        {"s1rmt3m1", "misc/cylshell"},           {"s2rmq4m1", "misc/cylshell"},
        {"s2rmt3m1", "misc/cylshell"},           {"s3dkq4m2", "misc/cylshell"},
        {"s3dkt3m2", "misc/cylshell"},           {"s3rmq4m1", "misc/cylshell"},
        {"s3rmt3m1", "misc/cylshell"},           {"s3rmt3m3", "misc/cylshell"},
    };
    return groups;
}

class HttpsTransport : public Transport {
public:
    std::string get(const std::string& url) override {
        std::string scheme, host, path;
        split_url(url, scheme, host, path);

        auto fetch = [&](auto& client) -> std::string {
            client.set_follow_location(true);
            client.set_connection_timeout(30);
            client.set_read_timeout(120);
            auto res = client.Get(path);
            if (!res)
                throw FetchError(FetchError::Code::Network,
                                 "network failure fetching " + url + ": " +
                                     httplib::to_string(res.error()));
            if (res->status == 404)
                throw FetchError(FetchError::Code::NotFound, "404 for " + url);
            if (res->status != 200)
                throw FetchError(FetchError::Code::Network,
                                 "HTTP " + std::to_string(res->status) + " for " + url);
            return res->body;
        };

        if (scheme == "https") {
            httplib::SSLClient client(host);
            return fetch(client);
        }
        httplib::Client client(host);
        return fetch(client);
    }

private:
    static void split_url(const std::string& url, std::string& scheme, std::string& host,
                          std::string& path) {
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos)
            throw FetchError(FetchError::Code::Network, "unsupported URL: " + url);
        scheme = url.substr(0, scheme_end);
        const auto host_start = scheme_end + 3;
        const auto path_start = url.find('/', host_start);
        host = url.substr(host_start,
                          path_start == std::string::npos ? std::string::npos
                                                          : path_start - host_start);
        path = path_start == std::string::npos ? "/" : url.substr(path_start);
    }
};

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("failed to write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

std::unique_ptr<Transport> make_https_transport() {
    return std::make_unique<HttpsTransport>();
}

bool looks_gzipped(const std::string& bytes) {
    return bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
           static_cast<unsigned char>(bytes[1]) == 0x8b;
}

std::string gunzip(const std::string& bytes) {
    z_stream strm{};
    if (inflateInit2(&strm, 15 + 32) != Z_OK)
        throw std::runtime_error("zlib initialization failed");
    std::string out;
    std::array<char, 1 << 16> buf;
    strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
    strm.avail_in = static_cast<uInt>(bytes.size());
    int rc = Z_OK;
    do {
        strm.next_out = reinterpret_cast<Bytef*>(buf.data());
        strm.avail_out = static_cast<uInt>(buf.size());
        rc = inflate(&strm, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&strm);
            throw std::runtime_error("gzip decompression failed");
        }
        out.append(buf.data(), buf.size() - strm.avail_out);
    } while (rc != Z_STREAM_END && (strm.avail_in > 0 || strm.avail_out == 0));
    inflateEnd(&strm);
    if (rc != Z_STREAM_END) throw std::runtime_error("truncated gzip stream");
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::vector<std::string> matrix_url_candidates(const std::string& base_url,
                                               const std::string& name) {
    std::vector<std::string> urls;
    const auto& groups = collection_groups();
    if (auto it = groups.find(name); it != groups.end())
        urls.push_back(base_url + "/" + it->second + "/" + name + ".mtx.gz");
    urls.push_back(base_url + "/" + name + ".mtx.gz");
    urls.push_back(base_url + "/" + name + ".mtx");
    return urls;
}

std::filesystem::path fetch_matrix(const std::string& name,
                                   const std::filesystem::path& cache_dir, Transport& transport,
                                   const std::string& base_url, bool force_refetch) {
    if (name.empty() || name.find('/') != std::string::npos)
        throw std::invalid_argument("matrix names must be plain file stems");
    std::filesystem::create_directories(cache_dir);
    const std::filesystem::path cached = cache_dir / (name + ".mtx");
    const std::filesystem::path hash_file = cache_dir / (name + ".sha256");

    if (!force_refetch && std::filesystem::exists(cached)) return cached;

    std::string body;
    FetchError last_error(FetchError::Code::NotFound, "no candidate URL for " + name);
    bool fetched = false;
    for (const auto& url : matrix_url_candidates(base_url, name)) {
        try {
            body = transport.get(url);
            fetched = true;
            break;
        } catch (const FetchError& e) {
            last_error = e;
            if (e.code != FetchError::Code::NotFound) break; // no point probing further offline
        }
    }
    if (!fetched) {
        if (last_error.code == FetchError::Code::Network)
            throw FetchError(FetchError::Code::Network,
                             "cache miss for '" + name + "' and " + last_error.what());
        throw last_error;
    }

    if (looks_gzipped(body)) {
        try {
            body = gunzip(body);
        } catch (const std::exception& e) {
            throw FetchError(FetchError::Code::Invalid,
                             "matrix '" + name + "' failed to decompress: " + e.what());
        }
    }

    // validate before touching the cache
    try {
        parse_matrix_market(body);
    } catch (const ParseError& e) {
        throw FetchError(FetchError::Code::Invalid,
                         "matrix '" + name + "' failed to parse: " + e.what());
    }

    const std::string digest = sha256_hex(body);
    if (std::filesystem::exists(hash_file)) {
        const std::string recorded = read_file(hash_file);
        if (!recorded.empty() && recorded != digest)
            throw FetchError(FetchError::Code::HashMismatch,
                             "matrix '" + name + "' content changed since first fetch");
    }

    write_file_atomically(cached, body);
    write_file_atomically(hash_file, digest);
    return cached;
}

} // namespace cgv
