#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <new>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <absl/container/flat_hash_set.h>

#include "wsp/model.hpp"

namespace wsp {

/// Min-vector encoding of an equivalence class of plans: entry i is 0 when
/// step i is unassigned, otherwise the 1-based index of its block, blocks
/// numbered in order of first appearance.
class Pattern {
public:
    Pattern() = default;
    /// Throws std::invalid_argument if `x` is not a min-vector.
    explicit Pattern(std::vector<std::uint8_t> x);

    static Pattern zero(int steps) { return Pattern(std::vector<std::uint8_t>(steps, 0)); }

    int step_count() const { return static_cast<int>(x_.size()); }
    std::span<const std::uint8_t> values() const { return x_; }
    std::uint8_t operator[](int i) const { return x_[i]; }

    /// Number of blocks, i.e. distinct users in any representative plan.
    int block_count() const;
    StepSet assigned() const;
    /// Steps in block `b` (1-based).
    StepSet block(int b) const;

    /// "1,1,2,3"
    std::string to_string() const;

    friend bool operator==(const Pattern&, const Pattern&) = default;

private:
    std::vector<std::uint8_t> x_;
};

bool is_min_vector(std::span<const std::uint8_t> x);

Pattern encode(const Plan& plan);
bool equivalent(const Plan& a, const Plan& b);

/// Lexicographic order on min-vectors of equal length.
std::strong_ordering compare(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
inline std::strong_ordering compare(const Pattern& a, const Pattern& b) { return compare(a.values(), b.values()); }

/// Parses the debug text form "1,1,2,3".
Pattern parse_pattern(std::string_view text);

namespace detail {

/// Growable array of trivially copyable values on malloc/realloc, so large
/// blocks grow by remapping instead of copying into a second buffer.
template <class T>
class Buffer {
public:
    Buffer() = default;
    Buffer(const Buffer& other) { *this = other; }
    Buffer(Buffer&& other) noexcept { swap(other); }
    Buffer& operator=(const Buffer& other) {
        if (this != &other) {
            resize(other.size_);
            if (size_) std::memcpy(data_, other.data_, size_ * sizeof(T));
        }
        return *this;
    }
    Buffer& operator=(Buffer&& other) noexcept {
        Buffer(std::move(other)).swap(*this);
        return *this;
    }
    ~Buffer() { std::free(data_); }

    void swap(Buffer& other) noexcept {
        std::swap(data_, other.data_);
        std::swap(size_, other.size_);
        std::swap(capacity_, other.capacity_);
    }

    T* data() { return data_; }
    const T* data() const { return data_; }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    /// New elements are uninitialized.
    void resize(std::size_t n) {
        if (n > capacity_) reallocate(n);
        size_ = n;
    }
    void append(const T* from, std::size_t n) {
        if (size_ + n > capacity_) reallocate(std::max(size_ + n, capacity_ + capacity_ / 2));
        if (n) std::memcpy(data_ + size_, from, n * sizeof(T));
        size_ += n;
    }
    void insert(std::size_t pos, const T* from, std::size_t n) {
        const std::size_t tail = size_ - pos;
        resize(size_ + n);
        std::memmove(data_ + pos + n, data_ + pos, tail * sizeof(T));
        std::memcpy(data_ + pos, from, n * sizeof(T));
    }
    void clear() {
        std::free(data_);
        data_ = nullptr;
        size_ = capacity_ = 0;
    }

private:
    void reallocate(std::size_t n) {
        void* p = std::realloc(data_, n * sizeof(T));
        if (!p) throw std::bad_alloc();
        data_ = static_cast<T*>(p);
        capacity_ = n;
    }

    T* data_ = nullptr;
    std::size_t size_ = 0;
    std::size_t capacity_ = 0;
};

}  // namespace detail

class PatternBatch;

/// Patterns kept sorted by min-vector, each with one representative plan.
/// The representative is stored as the user of each block, so entry i's plan
/// maps step s to block_users(i)[x_s - 1].
class PatternSet {
public:
    enum class InsertResult { inserted, already_present };

    explicit PatternSet(int steps) : k_(steps) {}

    int step_count() const { return k_; }
    std::size_t size() const { return keys_.size() / static_cast<std::size_t>(k_); }
    bool empty() const { return keys_.empty(); }

    std::span<const std::uint8_t> key(std::size_t i) const { return {keys_.data() + i * k_, static_cast<std::size_t>(k_)}; }
    std::span<const std::uint16_t> block_users(std::size_t i) const {
        return {users_.data() + i * k_, static_cast<std::size_t>(k_)};
    }
    Pattern pattern(std::size_t i) const { return Pattern({key(i).begin(), key(i).end()}); }
    Plan representative(std::size_t i) const;

    /// Binary search: O(k log size) comparisons.
    bool contains(std::span<const std::uint8_t> x) const;
    bool contains(const Pattern& p) const { return contains(p.values()); }

    /// Keeps the existing representative when the pattern is already present.
    /// The representative must encode to `p`.
    InsertResult insert(const Pattern& p, const Plan& representative);

    /// Bulk merge of patterns not already present here.
    void merge(PatternBatch&& batch);

private:
    std::size_t lower_bound(std::span<const std::uint8_t> x) const;

    int k_;
    detail::Buffer<std::uint8_t> keys_;
    detail::Buffer<std::uint16_t> users_;
};

/// Unordered, hash-indexed append buffer of patterns produced in one solver
/// iteration; merged into a PatternSet in bulk.
class PatternBatch {
public:
    explicit PatternBatch(int steps);
    PatternBatch(const PatternBatch&) = delete;
    PatternBatch& operator=(const PatternBatch&) = delete;

    std::size_t size() const { return keys_.size() / static_cast<std::size_t>(k_); }
    bool empty() const { return keys_.empty(); }

    bool contains(std::span<const std::uint8_t> x) const;
    /// Returns false when `x` is already present.
    bool insert(std::span<const std::uint8_t> x, std::span<const std::uint16_t> block_users);

    std::span<const std::uint8_t> key(std::size_t i) const { return {keys_.data() + i * k_, static_cast<std::size_t>(k_)}; }
    std::span<const std::uint16_t> block_users(std::size_t i) const {
        return {users_.data() + i * k_, static_cast<std::size_t>(k_)};
    }

private:
    friend class PatternSet;

    std::string_view view(std::span<const std::uint8_t> x) const {
        return {reinterpret_cast<const char*>(x.data()), x.size()};
    }

    struct Hash {
        using is_transparent = void;
        const PatternBatch* owner;
        std::size_t operator()(std::uint32_t i) const { return (*this)(owner->view(owner->key(i))); }
        std::size_t operator()(std::string_view s) const { return absl::Hash<std::string_view>{}(s); }
    };
    struct Eq {
        using is_transparent = void;
        const PatternBatch* owner;
        std::string_view get(std::uint32_t i) const { return owner->view(owner->key(i)); }
        std::string_view get(std::string_view s) const { return s; }
        template <class A, class B>
        bool operator()(const A& a, const B& b) const {
            return get(a) == get(b);
        }
    };

    int k_;
    detail::Buffer<std::uint8_t> keys_;
    detail::Buffer<std::uint16_t> users_;
    absl::flat_hash_set<std::uint32_t, Hash, Eq> index_;
};

}  // namespace wsp
