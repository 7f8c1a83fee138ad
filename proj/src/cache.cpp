#include "shapsrc/cache.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace shapsrc {

namespace {

constexpr char kMagic[8] = {'S', 'S', 'C', 'A', 'C', 'H', 'E', '1'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

struct Reader {
    std::istream& in;
    bool ok = true;

    std::uint32_t u32() {
        unsigned char b[4];
        if (!in.read(reinterpret_cast<char*>(b), 4)) { ok = false; return 0; }
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::uint64_t u64() {
        std::uint64_t lo = u32();
        std::uint64_t hi = u32();
        return lo | (hi << 32);
    }

    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

}  // namespace

ScoreVector SubsetScoreCache::get_or_compute(const SubsetKey& key,
                                             const std::function<ScoreVector()>& compute) {
    if (!enabled_) {
        {
            std::lock_guard lock(mu_);
            ++misses_;
        }
        ScoreVector v = compute();
        if (v.size() != arity_)
            throw OracleFailure("oracle returned " + std::to_string(v.size()) +
                                " scores, expected " + std::to_string(arity_));
        return v;
    }

    {
        std::unique_lock lock(mu_);
        for (;;) {
            auto it = entries_.find(key);
            if (it != entries_.end()) {
                ++hits_;
                return it->second;
            }
            if (!in_flight_.contains(key)) break;
            ready_.wait(lock);  // another thread is training this subset
        }
        in_flight_.insert(key);
        ++misses_;
    }

    ScoreVector v;
    try {
        v = compute();
    } catch (...) {
        std::lock_guard lock(mu_);
        in_flight_.erase(key);
        ready_.notify_all();
        throw;
    }

    std::lock_guard lock(mu_);
    in_flight_.erase(key);
    if (v.size() != arity_) {
        ready_.notify_all();
        throw OracleFailure("oracle returned " + std::to_string(v.size()) +
                            " scores, expected " + std::to_string(arity_));
    }
    entries_.emplace(key, v);
    ready_.notify_all();
    return v;
}

std::optional<ScoreVector> SubsetScoreCache::lookup(const SubsetKey& key) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void SubsetScoreCache::insert(const SubsetKey& key, ScoreVector score) {
    if (score.size() != arity_)
        throw InvalidInput("cache insert with wrong score arity");
    std::lock_guard lock(mu_);
    entries_.emplace(key, std::move(score));  // write-once: emplace keeps the first value
}

std::uint64_t SubsetScoreCache::hits() const {
    std::lock_guard lock(mu_);
    return hits_;
}

std::uint64_t SubsetScoreCache::misses() const {
    std::lock_guard lock(mu_);
    return misses_;
}

std::size_t SubsetScoreCache::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

void SubsetScoreCache::save(const std::string& path,
                            const std::function<std::uint64_t(const SubsetKey&)>& seed_of) const {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write cache file: " + path);

    std::string buf;
    buf.append(kMagic, 8);
    put_u32(buf, 1);  // format version
    put_u32(buf, static_cast<std::uint32_t>(arity_));

    std::lock_guard lock(mu_);
    for (const auto& [key, score] : entries_) {
        put_u32(buf, static_cast<std::uint32_t>(key.size()));
        buf += key.bytes();
        put_u64(buf, seed_of(key));
        for (double s : score) put_f64(buf, s);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw InvalidInput("failed writing cache file: " + path);
}

std::size_t SubsetScoreCache::load(const std::string& path, std::size_t universe,
                                   const std::function<std::uint64_t(const SubsetKey&)>& seed_of) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open cache file: " + path);

    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw InvalidInput("not a cache file (bad header): " + path);
    Reader r{in};
    const std::uint32_t version = r.u32();
    if (version != 1)
        throw InvalidInput("unsupported cache version " + std::to_string(version) + ": " + path);
    const std::uint32_t arity = r.u32();
    if (arity != arity_)
        throw InvalidInput("cache target arity " + std::to_string(arity) +
                           " does not match problem arity " + std::to_string(arity_));

    std::size_t kept = 0;
    for (;;) {
        const std::uint32_t count = r.u32();
        if (!r.ok) break;  // clean end of stream
        std::vector<std::uint32_t> members(count);
        for (auto& m : members) m = r.u32();
        const std::uint64_t seed = r.u64();
        ScoreVector score(arity_);
        for (auto& s : score) s = r.f64();
        if (!r.ok) throw InvalidInput("truncated cache record in " + path);

        SubsetKey key;
        try {
            key = make_subset_key(members, universe);
        } catch (const InvalidInput&) {
            continue;  // entry from a larger universe; skip
        }
        for (double s : score)
            if (!std::isfinite(s)) throw InvalidInput("non-finite score in cache file " + path);
        if (seed_of(key) != seed) continue;  // written under a different sampling config
        std::lock_guard lock(mu_);
        if (entries_.emplace(key, std::move(score)).second) ++kept;
    }
    return kept;
}

}  // namespace shapsrc
