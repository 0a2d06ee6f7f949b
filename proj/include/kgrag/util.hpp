#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kgrag {

// Transport or model failure from an external provider (LLM, embedding,
// reranker). Carries the attempt count when produced by a retry wrapper.
class ProviderError : public std::runtime_error {
public:
    explicit ProviderError(const std::string& what, int attempts = 1)
        : std::runtime_error(what), attempts_(attempts) {}
    int attempts() const { return attempts_; }

private:
    int attempts_;
};

// Failure while loading an external file (corpus, snapshot, fixtures).
// byte_offset is set when a JSON parse error pinpoints a position.
class LoadError : public std::runtime_error {
public:
    explicit LoadError(const std::string& what, std::size_t byte_offset = 0)
        : std::runtime_error(what), byte_offset_(byte_offset) {}
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Runs fn(0..n-1) on up to `parallelism` worker threads. Work items are
// claimed from an atomic counter; the first exception is rethrown after
// all workers join. parallelism <= 1 runs inline.
void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn);

} // namespace kgrag
