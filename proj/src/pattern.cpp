#include "wsp/pattern.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace wsp {

bool is_min_vector(std::span<const std::uint8_t> x) {
    int max_seen = 0;
    for (std::uint8_t v : x) {
        if (v == 0) continue;
        if (v > max_seen + 1) return false;
        max_seen = std::max<int>(max_seen, v);
    }
    return true;
}

Pattern::Pattern(std::vector<std::uint8_t> x) : x_(std::move(x)) {
    if (x_.size() > static_cast<std::size_t>(kMaxSteps) || !is_min_vector(x_)) {
        throw std::invalid_argument("not a min-vector");
    }
}

int Pattern::block_count() const { return x_.empty() ? 0 : *std::max_element(x_.begin(), x_.end()); }

StepSet Pattern::assigned() const {
    StepSet out;
    for (int i = 0; i < step_count(); ++i) {
        if (x_[i] != 0) out.insert(StepId{i});
    }
    return out;
}

StepSet Pattern::block(int b) const {
    StepSet out;
    for (int i = 0; i < step_count(); ++i) {
        if (x_[i] == b) out.insert(StepId{i});
    }
    return out;
}

std::string Pattern::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(x_[i]);
    }
    return out;
}

Pattern encode(const Plan& plan) {
    const int k = plan.step_count();
    std::vector<std::uint8_t> x(k, 0);
    std::uint8_t next = 1;
    for (int i = 0; i < k; ++i) {
        auto u = plan.user(StepId{i});
        if (!u) continue;
        for (int j = 0; j < i; ++j) {
            if (x[j] != 0 && plan.user(StepId{j}) == u) {
                x[i] = x[j];
                break;
            }
        }
        if (x[i] == 0) x[i] = next++;
    }
    return Pattern(std::move(x));
}

bool equivalent(const Plan& a, const Plan& b) { return encode(a) == encode(b); }

std::strong_ordering compare(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    int c = std::memcmp(a.data(), b.data(), std::min(a.size(), b.size()));
    if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    return a.size() <=> b.size();
}

Pattern parse_pattern(std::string_view text) {
    std::vector<std::uint8_t> x;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        unsigned value = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + end, value);
        if (ec != std::errc() || ptr != text.data() + end || value > 255) {
            throw std::invalid_argument("bad pattern text '" + std::string(text) + "'");
        }
        x.push_back(static_cast<std::uint8_t>(value));
        pos = end + 1;
    }
    return Pattern(std::move(x));
}

// ============================================================================
// PatternSet
// ============================================================================

std::size_t PatternSet::lower_bound(std::span<const std::uint8_t> x) const {
    std::size_t lo = 0;
    std::size_t hi = size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (std::memcmp(keys_.data() + mid * k_, x.data(), k_) < 0) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return lo;
}

bool PatternSet::contains(std::span<const std::uint8_t> x) const {
    std::size_t i = lower_bound(x);
    return i < size() && std::memcmp(keys_.data() + i * k_, x.data(), k_) == 0;
}

Plan PatternSet::representative(std::size_t i) const {
    Plan plan(k_);
    auto x = key(i);
    auto users = block_users(i);
    for (int s = 0; s < k_; ++s) {
        if (x[s] != 0) plan.assign(StepId{s}, UserId{users[x[s] - 1]});
    }
    return plan;
}

PatternSet::InsertResult PatternSet::insert(const Pattern& p, const Plan& representative) {
    if (p.step_count() != k_ || representative.step_count() != k_) {
        throw std::invalid_argument("pattern width does not match the set");
    }
    std::size_t i = lower_bound(p.values());
    if (i < size() && std::memcmp(keys_.data() + i * k_, p.values().data(), k_) == 0) {
        return InsertResult::already_present;
    }
    std::vector<std::uint16_t> users(k_, 0);
    for (int s = 0; s < k_; ++s) {
        if (p[s] != 0) users[p[s] - 1] = static_cast<std::uint16_t>(representative.user(StepId{s})->index);
    }
    keys_.insert(i * k_, p.values().data(), k_);
    users_.insert(i * k_, users.data(), k_);
    return InsertResult::inserted;
}

void PatternSet::merge(PatternBatch&& batch) {
    if (batch.k_ != k_) throw std::invalid_argument("pattern width does not match the set");
    batch.index_ = {};
    const std::size_t kk = static_cast<std::size_t>(k_);
    std::vector<std::uint32_t> order;
    order.reserve(batch.size());
    for (std::uint32_t i = 0; i < batch.size(); ++i) {
        if (!contains(batch.key(i))) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return std::memcmp(batch.keys_.data() + a * kk, batch.keys_.data() + b * kk, kk) < 0;
    });

    // Merge from the back so the grown arrays are filled in place.
    std::size_t a = size();
    std::size_t b = order.size();
    std::size_t out = a + b;
    keys_.resize(out * kk);
    users_.resize(out * kk);
    auto move_to = [&](std::size_t to, const std::uint8_t* key, const std::uint16_t* users) {
        std::memmove(keys_.data() + to * kk, key, kk);
        std::memmove(users_.data() + to * kk, users, kk * sizeof(std::uint16_t));
    };
    while (b > 0) {
        const std::size_t from = order[b - 1];
        const std::uint8_t* incoming = batch.keys_.data() + from * kk;
        if (a > 0 && std::memcmp(keys_.data() + (a - 1) * kk, incoming, kk) > 0) {
            --a;
            move_to(--out, keys_.data() + a * kk, users_.data() + a * kk);
        } else {
            move_to(--out, incoming, batch.users_.data() + from * kk);
            --b;
        }
    }

    batch.keys_.clear();
    batch.users_.clear();
}

// ============================================================================
// PatternBatch
// ============================================================================

PatternBatch::PatternBatch(int steps) : k_(steps), index_(0, Hash{this}, Eq{this}) {}

bool PatternBatch::contains(std::span<const std::uint8_t> x) const { return index_.contains(view(x)); }

bool PatternBatch::insert(std::span<const std::uint8_t> x, std::span<const std::uint16_t> block_users) {
    if (index_.contains(view(x))) return false;
    const auto id = static_cast<std::uint32_t>(size());
    keys_.append(x.data(), k_);
    users_.append(block_users.data(), k_);
    index_.insert(id);
    return true;
}

}  // namespace wsp
