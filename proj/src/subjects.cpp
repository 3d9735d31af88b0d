// Built-in subjects for the random tester. Each ships a faulty variant with
// documented edge-case faults and a corrected variant (faulty = false).

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

#include "rtg/harness.hpp"

namespace rtg::harness {

namespace {

using Args = std::span<const Arg>;

template <class S>
const S& as(const std::any& a) {
    return std::any_cast<const S&>(a);
}

std::int64_t int_arg(Args a, std::size_t i) { return std::get<std::int64_t>(a[i]); }

template <class S>
const S& object_arg(Args a, std::size_t i) {
    return as<S>(*std::get<std::any*>(a[i]));
}

bool aliases(Args a, std::size_t i, const std::any& self) {
    return std::get<std::any*>(a[i]) == &self;
}

Verdict ok() { return std::nullopt; }
Verdict check(bool cond, const char* clause) {
    if (cond) return std::nullopt;
    return std::string(clause);
}

constexpr auto no_pre = [](auto&&...) { return ok(); };

template <class S, class Pre, class Make, class Post>
SubjectOperation creator(std::string name, std::vector<SlotKind> slots, Pre pre, Make make,
                         Post post) {
    SubjectOperation op;
    op.name = std::move(name);
    op.kind = OperationKind::creator;
    op.slots = std::move(slots);
    op.precondition = [pre](const std::any*, Args a) { return pre(a); };
    op.body = [make](std::any& self, Args a) -> CallResult {
        self = make(a);
        return {};
    };
    op.postcondition = [post](const std::any&, const std::any& now, Args a, const CallResult&) {
        return post(as<S>(now), a);
    };
    return op;
}

template <class S, class Pre, class Body, class Post>
SubjectOperation mutator(std::string name, std::vector<SlotKind> slots, Pre pre, Body body,
                         Post post) {
    SubjectOperation op;
    op.name = std::move(name);
    op.kind = OperationKind::mutator;
    op.slots = std::move(slots);
    op.precondition = [pre](const std::any* self, Args a) { return pre(as<S>(*self), a); };
    op.body = [body](std::any& self, Args a) -> CallResult {
        return body(std::any_cast<S&>(self), a, self);
    };
    op.postcondition = [post](const std::any& old, const std::any& now, Args a,
                              const CallResult& r) { return post(as<S>(old), as<S>(now), a, r, now); };
    return op;
}

template <class S, class Pre, class Body, class Post>
SubjectOperation query(std::string name, std::vector<SlotKind> slots, Pre pre, Body body, Post post) {
    SubjectOperation op;
    op.name = std::move(name);
    op.kind = OperationKind::query;
    op.slots = std::move(slots);
    op.precondition = [pre](const std::any* self, Args a) { return pre(as<S>(*self), a); };
    op.body = [body](std::any& self, Args a) -> CallResult { return body(as<S>(self), a); };
    op.postcondition = [post](const std::any&, const std::any& now, Args a, const CallResult& r) {
        return post(as<S>(now), a, r);
    };
    return op;
}

std::int64_t result_int(const CallResult& r) { return std::get<std::int64_t>(r); }
bool result_bool(const CallResult& r) { return std::get<bool>(r); }

template <class S>
void finish(Subject& s) {
    s.describe = [](const std::any& a) { return as<S>(a).key(); };
    s.invariant = [](const std::any& a) { return as<S>(a).invariant(); };
}

std::string join(const std::vector<std::int64_t>& xs) {
    std::string out;
    for (auto x : xs) out.append(std::to_string(x)).push_back(',');
    return out;
}

// ---------------------------------------------------------------------------
// bounded_stack: fixed-capacity stack on a ring buffer. drop_bottom discards
// the oldest item, so the live region can wrap around the buffer end.

struct BoundedStack {
    std::vector<std::int64_t> buf;
    std::size_t base = 0;
    std::size_t count = 0;

    std::size_t capacity() const { return buf.size(); }
    bool full() const { return count == capacity(); }
    std::size_t slot(std::size_t i) const { return (base + i) % capacity(); }
    std::int64_t item(std::size_t i) const { return buf[slot(i)]; }
    std::int64_t top() const { return item(count - 1); }
    std::int64_t checked_item(std::size_t i) const {
        if (i >= count) throw std::out_of_range("bounded_stack item");
        return item(i);
    }
    void push(std::int64_t v) {
        buf[slot(count)] = v;
        ++count;
    }
    std::vector<std::int64_t> items() const {
        std::vector<std::int64_t> out;
        for (std::size_t i = 0; i < count; ++i) out.push_back(item(i));
        return out;
    }
    std::string key() const {
        return std::to_string(capacity()) + "/" + std::to_string(base) + "/" + join(items());
    }
    Verdict invariant() const {
        return check(capacity() >= 1 && count <= capacity() && base < capacity(), "indices_in_range");
    }
};

Subject bounded_stack(bool faulty) {
    using S = BoundedStack;
    Subject s;
    s.name = "bounded_stack";
    if (faulty) {
        s.known_faults = {
            "pop: reads the wrong slot when the newest item sits at index 0 after wraparound",
            "push_all: appending a stack to itself keeps copying until the stack is full",
            "is_full: reports false for a full stack of capacity 1",
            "item_at: precondition admits i = count, body then fails out of range",
        };
    }
    auto& ops = s.operations;

    ops.push_back(creator<S>(
        "make", {SlotKind::integer},
        [](Args a) { return check(int_arg(a, 0) >= 1, "capacity_positive"); },
        [](Args a) {
            S st;
            st.buf.assign(static_cast<std::size_t>(int_arg(a, 0)), 0);
            return st;
        },
        [](const S& st, Args a) {
            return check(st.count == 0 && st.capacity() == static_cast<std::size_t>(int_arg(a, 0)),
                         "empty_with_capacity");
        }));

    ops.push_back(mutator<S>(
        "push", {SlotKind::integer}, [](const S& st, Args) { return check(!st.full(), "not_full"); },
        [](S& st, Args a, std::any&) -> CallResult {
            st.push(int_arg(a, 0));
            return {};
        },
        [](const S& old, const S& st, Args a, const CallResult&, const std::any&) {
            return check(st.count == old.count + 1 && st.top() == int_arg(a, 0), "pushed_on_top");
        }));

    ops.push_back(mutator<S>(
        "push_checked", {SlotKind::integer}, no_pre,
        [](S& st, Args a, std::any&) -> CallResult {
            if (st.full()) throw Raised{"overflow"};
            st.push(int_arg(a, 0));
            return {};
        },
        [](const S& old, const S& st, Args a, const CallResult&, const std::any&) {
            return check(st.count == old.count + 1 && st.top() == int_arg(a, 0), "pushed_on_top");
        }));
    ops.back().declared_failures = {"overflow"};

    ops.push_back(mutator<S>(
        "pop", {}, [](const S& st, Args) { return check(st.count > 0, "not_empty"); },
        [faulty](S& st, Args, std::any&) -> CallResult {
            const std::size_t cap = st.capacity();
            std::size_t newest = st.base + st.count - 1;
            if (faulty) {
                if (newest > cap) newest -= cap;
                newest = std::min(newest, cap - 1);
            } else if (newest >= cap) {
                newest -= cap;
            }
            const std::int64_t v = st.buf[newest];
            --st.count;
            return v;
        },
        [](const S& old, const S& st, Args, const CallResult& r, const std::any&) {
            return check(result_int(r) == old.top() && st.count == old.count - 1, "returns_old_top");
        }));

    ops.push_back(query<S>(
        "top", {}, [](const S& st, Args) { return check(st.count > 0, "not_empty"); },
        [](const S& st, Args) -> CallResult { return st.top(); },
        [](const S& st, Args, const CallResult& r) {
            return check(result_int(r) == st.item(st.count - 1), "is_newest");
        }));

    ops.push_back(mutator<S>(
        "drop_bottom", {}, [](const S& st, Args) { return check(st.count > 0, "not_empty"); },
        [](S& st, Args, std::any&) -> CallResult {
            st.base = (st.base + 1) % st.capacity();
            --st.count;
            return {};
        },
        [](const S& old, const S& st, Args, const CallResult&, const std::any&) {
            auto expected = old.items();
            expected.erase(expected.begin());
            return check(st.items() == expected, "removes_oldest");
        }));

    ops.push_back(mutator<S>(
        "push_all", {SlotKind::object},
        [](const S& st, Args a) {
            return check(st.count + object_arg<S>(a, 0).count <= st.capacity(), "fits");
        },
        [faulty](S& st, Args a, std::any&) -> CallResult {
            const S& other = object_arg<S>(a, 0);
            if (faulty) {
                for (std::size_t i = 0; i < other.count && !st.full(); ++i) st.push(other.item(i));
            } else {
                for (auto v : other.items()) st.push(v);
            }
            return {};
        },
        [](const S& old, const S& st, Args a, const CallResult&, const std::any& self) {
            const std::size_t added = aliases(a, 0, self) ? old.count : object_arg<S>(a, 0).count;
            return check(st.count == old.count + added, "count_adds_up");
        }));

    ops.push_back(query<S>(
        "is_full", {}, no_pre,
        [faulty](const S& st, Args) -> CallResult {
            if (faulty) return st.count == st.capacity() && st.capacity() > 1;
            return st.full();
        },
        [](const S& st, Args, const CallResult& r) {
            return check(result_bool(r) == (st.count == st.capacity()), "matches_count");
        }));

    ops.push_back(query<S>(
        "count", {}, no_pre, [](const S& st, Args) -> CallResult {
            return static_cast<std::int64_t>(st.count);
        },
        [](const S& st, Args, const CallResult& r) {
            return check(result_int(r) == static_cast<std::int64_t>(st.count), "matches_count");
        }));

    ops.push_back(query<S>(
        "item_at", {SlotKind::integer},
        [faulty](const S& st, Args a) {
            const auto i = int_arg(a, 0);
            const auto n = static_cast<std::int64_t>(st.count);
            return check(i >= 0 && (faulty ? i <= n : i < n), "valid_index");
        },
        [](const S& st, Args a) -> CallResult {
            return st.checked_item(static_cast<std::size_t>(int_arg(a, 0)));
        },
        [](const S& st, Args a, const CallResult& r) {
            return check(result_int(r) == st.item(static_cast<std::size_t>(int_arg(a, 0))),
                         "matches_item");
        }));

    ops.push_back(mutator<S>(
        "clear", {}, no_pre,
        [](S& st, Args, std::any&) -> CallResult {
            st.count = 0;
            st.base = 0;
            return {};
        },
        [](const S&, const S& st, Args, const CallResult&, const std::any&) {
            return check(st.count == 0, "empty");
        }));

    finish<S>(s);
    return s;
}

// ---------------------------------------------------------------------------
// sorted_list: ascending multiset stored in a vector.

struct SortedList {
    std::vector<std::int64_t> items;

    std::int64_t occurrences(std::int64_t v) const {
        return static_cast<std::int64_t>(std::count(items.begin(), items.end(), v));
    }
    void insert(std::int64_t v) {
        items.insert(std::upper_bound(items.begin(), items.end(), v), v);
    }
    std::string key() const { return join(items); }
    Verdict invariant() const { return check(std::is_sorted(items.begin(), items.end()), "sorted"); }
};

Subject sorted_list(bool faulty) {
    using S = SortedList;
    Subject s;
    s.name = "sorted_list";
    if (faulty) {
        s.known_faults = {
            "remove: deletes every copy of a duplicated value instead of one",
            "index_of: for a value above the maximum returns the last index instead of -1",
            "kth: precondition admits i = count, body then fails out of range",
        };
    }
    auto& ops = s.operations;

    ops.push_back(creator<S>(
        "make", {}, [](Args) { return ok(); }, [](Args) { return S{}; },
        [](const S& st, Args) { return check(st.items.empty(), "empty"); }));

    ops.push_back(mutator<S>(
        "insert", {SlotKind::integer}, no_pre,
        [](S& st, Args a, std::any&) -> CallResult {
            st.insert(int_arg(a, 0));
            return {};
        },
        [](const S& old, const S& st, Args a, const CallResult&, const std::any&) {
            const auto v = int_arg(a, 0);
            return check(st.items.size() == old.items.size() + 1 &&
                             st.occurrences(v) == old.occurrences(v) + 1,
                         "one_more");
        }));

    ops.push_back(mutator<S>(
        "remove", {SlotKind::integer},
        [](const S& st, Args a) { return check(st.occurrences(int_arg(a, 0)) > 0, "has_item"); },
        [faulty](S& st, Args a, std::any&) -> CallResult {
            const auto v = int_arg(a, 0);
            const auto range = std::equal_range(st.items.begin(), st.items.end(), v);
            if (faulty) st.items.erase(range.first, range.second);
            else st.items.erase(range.first);
            return {};
        },
        [](const S& old, const S& st, Args a, const CallResult&, const std::any&) {
            const auto v = int_arg(a, 0);
            return check(st.items.size() + 1 == old.items.size() &&
                             st.occurrences(v) + 1 == old.occurrences(v),
                         "removes_one");
        }));

    ops.push_back(query<S>(
        "index_of", {SlotKind::integer}, no_pre,
        [faulty](const S& st, Args a) -> CallResult {
            const auto v = int_arg(a, 0);
            const auto it = std::lower_bound(st.items.begin(), st.items.end(), v);
            if (it == st.items.end()) {
                if (faulty && !st.items.empty())
                    return static_cast<std::int64_t>(st.items.size()) - 1;
                return std::int64_t{-1};
            }
            if (*it != v) return std::int64_t{-1};
            return static_cast<std::int64_t>(it - st.items.begin());
        },
        [](const S& st, Args a, const CallResult& r) {
            const auto v = int_arg(a, 0);
            const auto i = result_int(r);
            if (i < 0) return check(st.occurrences(v) == 0, "absent_iff_negative");
            return check(i < static_cast<std::int64_t>(st.items.size()) &&
                             st.items[static_cast<std::size_t>(i)] == v,
                         "points_at_item");
        }));

    ops.push_back(query<S>(
        "kth", {SlotKind::integer},
        [faulty](const S& st, Args a) {
            const auto i = int_arg(a, 0);
            const auto n = static_cast<std::int64_t>(st.items.size());
            return check(i >= 0 && (faulty ? i <= n : i < n), "valid_index");
        },
        [](const S& st, Args a) -> CallResult {
            return st.items.at(static_cast<std::size_t>(int_arg(a, 0)));
        },
        [](const S& st, Args a, const CallResult& r) {
            return check(result_int(r) == st.items[static_cast<std::size_t>(int_arg(a, 0))],
                         "matches_item");
        }));

    ops.push_back(query<S>(
        "min", {}, [](const S& st, Args) { return check(!st.items.empty(), "not_empty"); },
        [](const S& st, Args) -> CallResult { return st.items.front(); },
        [](const S& st, Args, const CallResult& r) {
            return check(result_int(r) == *std::min_element(st.items.begin(), st.items.end()),
                         "is_smallest");
        }));

    ops.push_back(mutator<S>(
        "merge", {SlotKind::object}, no_pre,
        [](S& st, Args a, std::any&) -> CallResult {
            const auto incoming = object_arg<S>(a, 0).items;
            for (auto v : incoming) st.insert(v);
            return {};
        },
        [](const S& old, const S& st, Args a, const CallResult&, const std::any& self) {
            const std::size_t added =
                aliases(a, 0, self) ? old.items.size() : object_arg<S>(a, 0).items.size();
            return check(st.items.size() == old.items.size() + added, "count_adds_up");
        }));

    ops.push_back(query<S>(
        "count", {}, no_pre,
        [](const S& st, Args) -> CallResult { return static_cast<std::int64_t>(st.items.size()); },
        [](const S& st, Args, const CallResult& r) {
            return check(result_int(r) == static_cast<std::int64_t>(st.items.size()), "matches_size");
        }));

    finish<S>(s);
    return s;
}

// ---------------------------------------------------------------------------
// hash_bag: multiset over eight buckets with a cached element count.

struct HashBag {
    std::array<std::vector<std::int64_t>, 8> buckets;
    std::size_t size = 0;

    static std::size_t bucket_of(std::int64_t v, bool faulty) {
        if (faulty) return static_cast<std::size_t>(v % 8);
        return static_cast<std::size_t>(((v % 8) + 8) % 8);
    }
    std::int64_t occurrences(std::int64_t v) const {
        std::int64_t n = 0;
        for (const auto& b : buckets) n += std::count(b.begin(), b.end(), v);
        return n;
    }
    std::size_t stored() const {
        std::size_t n = 0;
        for (const auto& b : buckets) n += b.size();
        return n;
    }
    std::string key() const {
        std::vector<std::int64_t> all;
        for (const auto& b : buckets) all.insert(all.end(), b.begin(), b.end());
        std::sort(all.begin(), all.end());
        return std::to_string(size) + "/" + join(all);
    }
    Verdict invariant() const { return check(size == stored(), "size_matches_buckets"); }
};

Subject hash_bag(bool faulty) {
    using S = HashBag;
    Subject s;
    s.name = "hash_bag";
    if (faulty) {
        s.known_faults = {
            "bucket index of a negative value is computed with a negative remainder",
            "remove_all: skips the element after each erased one, leaving adjacent duplicates",
            "clear: leaves the cached size untouched when it holds eight or more elements",
        };
    }
    auto& ops = s.operations;

    ops.push_back(creator<S>(
        "make", {}, [](Args) { return ok(); }, [](Args) { return S{}; },
        [](const S& st, Args) { return check(st.size == 0, "empty"); }));

    ops.push_back(mutator<S>(
        "add", {SlotKind::integer}, no_pre,
        [faulty](S& st, Args a, std::any&) -> CallResult {
            const auto v = int_arg(a, 0);
            st.buckets.at(S::bucket_of(v, faulty)).push_back(v);
            ++st.size;
            return {};
        },
        [](const S& old, const S& st, Args a, const CallResult&, const std::any&) {
            const auto v = int_arg(a, 0);
            return check(st.size == old.size + 1 && st.occurrences(v) == old.occurrences(v) + 1,
                         "one_more");
        }));

    ops.push_back(query<S>(
        "occurrences", {SlotKind::integer}, no_pre,
        [faulty](const S& st, Args a) -> CallResult {
            const auto v = int_arg(a, 0);
            const auto& b = st.buckets.at(S::bucket_of(v, faulty));
            return static_cast<std::int64_t>(std::count(b.begin(), b.end(), v));
        },
        [](const S& st, Args a, const CallResult& r) {
            return check(result_int(r) == st.occurrences(int_arg(a, 0)), "matches_scan");
        }));

    ops.push_back(mutator<S>(
        "remove_one", {SlotKind::integer},
        [](const S& st, Args a) { return check(st.occurrences(int_arg(a, 0)) > 0, "has_item"); },
        [](S& st, Args a, std::any&) -> CallResult {
            const auto v = int_arg(a, 0);
            for (auto& b : st.buckets) {
                const auto it = std::find(b.begin(), b.end(), v);
                if (it != b.end()) {
                    b.erase(it);
                    --st.size;
                    break;
                }
            }
            return {};
        },
        [](const S& old, const S& st, Args a, const CallResult&, const std::any&) {
            const auto v = int_arg(a, 0);
            return check(st.occurrences(v) + 1 == old.occurrences(v), "removes_one");
        }));

    ops.push_back(mutator<S>(
        "remove_all", {SlotKind::integer}, no_pre,
        [faulty](S& st, Args a, std::any&) -> CallResult {
            const auto v = int_arg(a, 0);
            for (auto& b : st.buckets) {
                if (faulty) {
                    for (std::size_t i = 0; i < b.size(); ++i) {
                        if (b[i] == v) {
                            b.erase(b.begin() + static_cast<std::ptrdiff_t>(i));
                            --st.size;
                        }
                    }
                } else {
                    const auto before = b.size();
                    b.erase(std::remove(b.begin(), b.end(), v), b.end());
                    st.size -= before - b.size();
                }
            }
            return {};
        },
        [](const S&, const S& st, Args a, const CallResult&, const std::any&) {
            return check(st.occurrences(int_arg(a, 0)) == 0, "none_left");
        }));

    ops.push_back(mutator<S>(
        "take_any", {}, no_pre,
        [](S& st, Args, std::any&) -> CallResult {
            for (auto& b : st.buckets) {
                if (!b.empty()) {
                    const auto v = b.back();
                    b.pop_back();
                    --st.size;
                    return v;
                }
            }
            throw Raised{"empty"};
        },
        [](const S& old, const S& st, Args, const CallResult& r, const std::any&) {
            return check(st.size + 1 == old.size && st.occurrences(result_int(r)) + 1 ==
                                                        old.occurrences(result_int(r)),
                         "removes_one");
        }));
    ops.back().declared_failures = {"empty"};

    ops.push_back(mutator<S>(
        "clear", {}, no_pre,
        [faulty](S& st, Args, std::any&) -> CallResult {
            for (auto& b : st.buckets) b.clear();
            if (!faulty || st.size < 8) st.size = 0;
            return {};
        },
        [](const S&, const S& st, Args, const CallResult&, const std::any&) {
            return check(st.stored() == 0, "empty");
        }));

    ops.push_back(query<S>(
        "count", {}, no_pre,
        [](const S& st, Args) -> CallResult { return static_cast<std::int64_t>(st.size); },
        [](const S& st, Args, const CallResult& r) {
            return check(result_int(r) == static_cast<std::int64_t>(st.size), "matches_size");
        }));

    finish<S>(s);
    return s;
}

// ---------------------------------------------------------------------------
// cursor_tree: unbalanced binary search tree with a navigation cursor.

struct CursorTree {
    struct Node {
        std::int64_t value = 0;
        int left = -1, right = -1, parent = -1;
        bool live = true;
    };
    std::vector<Node> nodes;
    int root = -1;
    int cursor = -1;
    int cached_height = 0;  // maintained incrementally on insert

    const Node& at(int i) const { return nodes.at(static_cast<std::size_t>(i)); }
    Node& at(int i) { return nodes.at(static_cast<std::size_t>(i)); }

    std::int64_t live_count() const {
        return std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.live; });
    }
    int height_of(int i) const {
        if (i < 0) return 0;
        return 1 + std::max(height_of(at(i).left), height_of(at(i).right));
    }
    bool contains(std::int64_t v) const {
        int i = root;
        while (i >= 0) {
            if (at(i).value == v) return true;
            i = v < at(i).value ? at(i).left : at(i).right;
        }
        return false;
    }
    void insert(std::int64_t v) {
        const int id = static_cast<int>(nodes.size());
        nodes.push_back({v, -1, -1, -1, true});
        int depth = 1;
        if (root < 0) {
            root = id;
            cursor = id;
        } else {
            int i = root;
            while (true) {
                ++depth;
                int& next = v < at(i).value ? at(i).left : at(i).right;
                if (next < 0) {
                    next = id;
                    at(id).parent = i;
                    break;
                }
                i = next;
            }
        }
        cached_height = std::max(cached_height, depth);
    }
    std::string shape(int i) const {
        if (i < 0) return ".";
        return "(" + shape(at(i).left) + std::to_string(at(i).value) + shape(at(i).right) + ")";
    }
    std::string key() const {
        // Cursor position as its in-order path from the root.
        std::string path;
        for (int i = cursor; i >= 0 && at(i).parent >= 0; i = at(i).parent)
            path.push_back(at(at(i).parent).left == i ? 'L' : 'R');
        return shape(root) + "@" + (cursor < 0 ? "-" : path) + "#" + std::to_string(cached_height) +
               "#" + std::to_string(live_count());
    }
    Verdict invariant() const {
        std::int64_t reachable = 0;
        std::vector<int> stack;
        if (root >= 0) {
            if (!at(root).live || at(root).parent != -1) return "links_consistent";
            stack.push_back(root);
        }
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            ++reachable;
            for (int c : {at(i).left, at(i).right}) {
                if (c < 0) continue;
                if (!at(c).live || at(c).parent != i) return "links_consistent";
                stack.push_back(c);
            }
        }
        if (reachable != live_count()) return "links_consistent";
        if (cursor >= 0 && !at(cursor).live) return "cursor_on_live_node";
        return std::nullopt;
    }
};

Subject cursor_tree(bool faulty) {
    using S = CursorTree;
    Subject s;
    s.name = "cursor_tree";
    if (faulty) {
        s.known_faults = {
            "height: cached height is not lowered when remove_leaf shortens the tree",
            "remove_leaf: a removed right child stays linked from its parent",
            "go_up: missing precondition, fails out of range at the root",
        };
    }
    auto& ops = s.operations;

    ops.push_back(creator<S>(
        "make", {}, [](Args) { return ok(); }, [](Args) { return S{}; },
        [](const S& st, Args) { return check(st.root < 0, "empty"); }));

    ops.push_back(mutator<S>(
        "insert", {SlotKind::integer}, no_pre,
        [](S& st, Args a, std::any&) -> CallResult {
            st.insert(int_arg(a, 0));
            return {};
        },
        [](const S& old, const S& st, Args a, const CallResult&, const std::any&) {
            return check(st.contains(int_arg(a, 0)) && st.live_count() == old.live_count() + 1,
                         "inserted");
        }));

    const auto has_cursor = [](const S& st, Args) { return check(st.cursor >= 0, "cursor_valid"); };

    ops.push_back(mutator<S>(
        "go_root", {}, [](const S& st, Args) { return check(st.root >= 0, "not_empty"); },
        [](S& st, Args, std::any&) -> CallResult {
            st.cursor = st.root;
            return {};
        },
        [](const S&, const S& st, Args, const CallResult&, const std::any&) {
            return check(st.cursor == st.root, "at_root");
        }));

    ops.push_back(mutator<S>(
        "go_left", {},
        [](const S& st, Args) { return check(st.cursor >= 0 && st.at(st.cursor).left >= 0, "has_left"); },
        [](S& st, Args, std::any&) -> CallResult {
            st.cursor = st.at(st.cursor).left;
            return {};
        },
        [](const S& old, const S& st, Args, const CallResult&, const std::any&) {
            return check(st.cursor == old.at(old.cursor).left, "moved_left");
        }));

    ops.push_back(mutator<S>(
        "go_right", {},
        [](const S& st, Args) { return check(st.cursor >= 0 && st.at(st.cursor).right >= 0, "has_right"); },
        [](S& st, Args, std::any&) -> CallResult {
            st.cursor = st.at(st.cursor).right;
            return {};
        },
        [](const S& old, const S& st, Args, const CallResult&, const std::any&) {
            return check(st.cursor == old.at(old.cursor).right, "moved_right");
        }));

    ops.push_back(mutator<S>(
        "go_up", {},
        [faulty](const S& st, Args) {
            if (faulty) return check(st.cursor >= 0, "cursor_valid");
            return check(st.cursor >= 0 && st.at(st.cursor).parent >= 0, "not_root");
        },
        [](S& st, Args, std::any&) -> CallResult {
            const int up = st.at(st.cursor).parent;
            st.at(up);  // throws at the root
            st.cursor = up;
            return {};
        },
        [](const S& old, const S& st, Args, const CallResult&, const std::any&) {
            return check(st.cursor == old.at(old.cursor).parent, "moved_up");
        }));

    ops.push_back(query<S>(
        "item", {}, has_cursor, [](const S& st, Args) -> CallResult { return st.at(st.cursor).value; },
        [](const S& st, Args, const CallResult& r) {
            return check(result_int(r) == st.at(st.cursor).value, "cursor_value");
        }));

    ops.push_back(mutator<S>(
        "remove_leaf", {},
        [](const S& st, Args) {
            return check(st.cursor >= 0 && st.at(st.cursor).left < 0 && st.at(st.cursor).right < 0,
                         "cursor_on_leaf");
        },
        [faulty](S& st, Args, std::any&) -> CallResult {
            const int leaf = st.cursor;
            const int parent = st.at(leaf).parent;
            st.at(leaf).live = false;
            if (parent < 0) {
                st.root = -1;
            } else if (st.at(parent).left == leaf) {
                st.at(parent).left = -1;
            } else if (!faulty) {
                st.at(parent).right = -1;
            }
            st.cursor = parent;
            if (!faulty) st.cached_height = st.height_of(st.root);
            return {};
        },
        [](const S& old, const S& st, Args, const CallResult&, const std::any&) {
            return check(st.live_count() + 1 == old.live_count(), "one_fewer");
        }));

    ops.push_back(query<S>(
        "height", {}, no_pre,
        [](const S& st, Args) -> CallResult { return static_cast<std::int64_t>(st.cached_height); },
        [](const S& st, Args, const CallResult& r) {
            return check(result_int(r) == st.height_of(st.root), "matches_structure");
        }));

    ops.push_back(query<S>(
        "count", {}, no_pre,
        [](const S& st, Args) -> CallResult { return st.live_count(); },
        [](const S& st, Args, const CallResult& r) {
            return check(result_int(r) == st.live_count(), "matches_nodes");
        }));

    finish<S>(s);
    return s;
}

}  // namespace

std::vector<std::string> builtin_subjects() {
    return {"bounded_stack", "sorted_list", "hash_bag", "cursor_tree"};
}

Subject make_subject(std::string_view name, bool faulty) {
    if (name == "bounded_stack") return bounded_stack(faulty);
    if (name == "sorted_list") return sorted_list(faulty);
    if (name == "hash_bag") return hash_bag(faulty);
    if (name == "cursor_tree") return cursor_tree(faulty);
    throw std::invalid_argument("unknown subject '" + std::string(name) + "'");
}

}  // namespace rtg::harness
