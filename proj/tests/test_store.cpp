#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "sxp/rng.hpp"
#include "sxp/store.hpp"

using namespace sxp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("sxp_store_test_" + std::to_string(Rng(::getpid()).next_u64() % 1000000) +
                "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

// scripted peer: accepts a limited number of entries, then fails
class ScriptedAcknowledger : public Acknowledger {
public:
    explicit ScriptedAcknowledger(std::size_t accept_limit, bool throw_after = false)
        : limit_(accept_limit), throw_after_(throw_after) {}

    std::size_t deliver(const std::vector<JournalEntry>& batch) override {
        for (const auto& e : batch) delivered.push_back(e.seq);
        if (throw_after_ && batch.size() > limit_) {
            // transport failure before anything could be confirmed
            if (limit_ == 0) throw std::runtime_error("peer unreachable");
        }
        const std::size_t accepted = std::min(limit_, batch.size());
        for (std::size_t i = 0; i < accepted; ++i) remote.insert(batch[i].seq);
        return accepted;
    }

    std::vector<std::uint64_t> delivered;
    std::set<std::uint64_t> remote;

private:
    std::size_t limit_;
    bool throw_after_;
};

std::vector<unsigned char> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("append assigns increasing sequence numbers starting at 1") {
    TempDir dir;
    auto j = Journal::open(dir.file("j.log"));
    CHECK(j.append("first", 1000) == 1);
    CHECK(j.append("second", 2000) == 2);
    REQUIRE(j.entries().size() == 2);
    CHECK(j.entries()[0].payload == "first");
    CHECK(!j.entries()[0].synced);
}

TEST_CASE("entries survive reopen") {
    TempDir dir;
    {
        auto j = Journal::open(dir.file("j.log"));
        j.append("alpha", 1000);
        j.append("beta", 2000);
    }
    auto j = Journal::open(dir.file("j.log"));
    REQUIRE(j.entries().size() == 2);
    CHECK(j.entries()[0].payload == "alpha");
    CHECK(j.entries()[1].payload == "beta");
    CHECK(j.append("gamma", 3000) == 3);
}

TEST_CASE("sync marks everything when the peer accepts all") {
    TempDir dir;
    auto j = Journal::open(dir.file("j.log"));
    for (int i = 0; i < 5; ++i) j.append("p" + std::to_string(i), i);
    ScriptedAcknowledger peer(100);
    const auto rep = j.sync_cycle(peer, 9000);
    CHECK(rep.sent == 5);
    CHECK(rep.acked == 5);
    CHECK(rep.peer_ok);
    CHECK(rep.retry_boost == 0);
    CHECK(j.unsynced_count() == 0);
    for (const auto& e : j.entries()) {
        CHECK(e.synced);
        CHECK(e.synced_at == 9000);
    }
}

TEST_CASE("partial ack marks exactly the acknowledged prefix") {
    TempDir dir;
    auto j = Journal::open(dir.file("j.log"));
    for (int i = 0; i < 5; ++i) j.append("p" + std::to_string(i), i);
    ScriptedAcknowledger peer(3);
    const auto rep = j.sync_cycle(peer, 9000);
    CHECK(rep.acked == 3);
    CHECK(rep.retry_boost == 1);  // pressure flag grows on partial acks
    CHECK(j.unsynced_count() == 2);
    CHECK(j.entries()[2].synced);
    CHECK(!j.entries()[3].synced);
}

TEST_CASE("re-running sync after a partial ack sends only the remainder") {
    TempDir dir;
    auto j = Journal::open(dir.file("j.log"));
    for (int i = 0; i < 5; ++i) j.append("p" + std::to_string(i), i);
    ScriptedAcknowledger peer(3);
    j.sync_cycle(peer, 9000);
    peer.delivered.clear();
    ScriptedAcknowledger peer2(100);
    const auto rep = j.sync_cycle(peer2, 9500);
    CHECK(rep.sent == 2);
    CHECK(rep.acked == 2);
    CHECK(peer2.delivered == std::vector<std::uint64_t>{4, 5});
    CHECK(j.unsynced_count() == 0);
}

TEST_CASE("transport failure marks nothing and raises the retry flag") {
    TempDir dir;
    auto j = Journal::open(dir.file("j.log"));
    for (int i = 0; i < 4; ++i) j.append("p" + std::to_string(i), i);
    ScriptedAcknowledger peer(0, true);
    const auto rep = j.sync_cycle(peer, 9000);
    CHECK(!rep.peer_ok);
    CHECK(rep.acked == 0);
    CHECK(rep.retry_boost == 1);
    CHECK(j.unsynced_count() == 4);
    const auto rep2 = j.sync_cycle(peer, 9100);
    CHECK(rep2.retry_boost == 2);  // keeps growing while the peer is down
}

TEST_CASE("sync marks survive reopen") {
    TempDir dir;
    {
        auto j = Journal::open(dir.file("j.log"));
        for (int i = 0; i < 4; ++i) j.append("p" + std::to_string(i), i);
        ScriptedAcknowledger peer(2);
        j.sync_cycle(peer, 7777);
    }
    auto j = Journal::open(dir.file("j.log"));
    CHECK(j.entries()[0].synced);
    CHECK(j.entries()[1].synced);
    CHECK(j.entries()[1].synced_at == 7777);
    CHECK(!j.entries()[2].synced);
}

TEST_CASE("compact removes only synced entries older than the retention window") {
    TempDir dir;
    constexpr std::int64_t kDay = 86400LL * 1000;
    auto j = Journal::open(dir.file("j.log"));
    j.append("old-synced", 0);
    j.append("new-synced", 0);
    j.append("old-unsynced", 0);
    ScriptedAcknowledger peer(2);
    j.sync_cycle(peer, 0);  // first two synced at t=0

    SUBCASE("nothing synced long enough ago") {
        CHECK(j.compact(28 * kDay, 10 * kDay) == 0);
        CHECK(j.entries().size() == 3);
    }
    SUBCASE("forty-day-old synced entries go, unsynced stay") {
        // make entry 2's mark fresh by re-syncing at a later time
        const std::size_t removed = j.compact(28 * kDay, 40 * kDay);
        CHECK(removed == 2);
        REQUIRE(j.entries().size() == 1);
        CHECK(j.entries()[0].payload == "old-unsynced");
        CHECK(j.entries()[0].seq == 3);
        // sequence numbers never reused after compaction
        CHECK(j.append("next", 41 * kDay) == 4);
        // removed entries stay gone across reopen
        auto j2 = Journal::open(dir.file("j.log"));
        CHECK(j2.entries().size() == 2);
        CHECK(j2.entries()[0].seq == 3);
    }
}

TEST_CASE("crash injection: torn appends never corrupt the visible prefix") {
    TempDir dir;
    Rng rng(77);
    for (int trial = 0; trial < 250; ++trial) {
        const std::string path = dir.file("crash" + std::to_string(trial) + ".log");
        std::vector<std::string> confirmed;
        {
            auto j = Journal::open(path);
            const int n = rng.uniform_int(1, 6);
            for (int i = 0; i < n; ++i) {
                const std::string payload =
                    "payload-" + std::to_string(trial) + "-" + std::to_string(i) +
                    std::string(static_cast<std::size_t>(rng.uniform_int(0, 40)), 'x');
                j.append(payload, i);
                confirmed.push_back(payload);
            }
        }
        auto before = read_bytes(path);
        // simulate a crash in the middle of the next append: write a prefix
        // of the record at the tail
        {
            auto j = Journal::open(path);
            j.append("in-flight-" + std::to_string(trial), 999);
        }
        auto full = read_bytes(path);
        REQUIRE(full.size() > before.size());
        const std::size_t cut =
            before.size() +
            static_cast<std::size_t>(rng.below(full.size() - before.size()));
        std::vector<unsigned char> torn(full.begin(),
                                        full.begin() + static_cast<std::ptrdiff_t>(cut));
        write_bytes(path, torn);

        auto j = Journal::open(path);
        REQUIRE(j.entries().size() == confirmed.size());
        for (std::size_t i = 0; i < confirmed.size(); ++i)
            CHECK(j.entries()[i].payload == confirmed[i]);
        // the journal stays appendable after truncation
        const auto seq = j.append("after-crash", 1000);
        CHECK(seq == confirmed.size() + 1);
    }
}

TEST_CASE("crash injection: no acknowledged-or-visible payload is ever lost") {
    TempDir dir;
    Rng rng(99);
    for (int trial = 0; trial < 250; ++trial) {
        const std::string path = dir.file("sync_crash" + std::to_string(trial) + ".log");
        ScriptedAcknowledger peer(static_cast<std::size_t>(rng.uniform_int(0, 6)));
        std::vector<std::string> confirmed;  // appends that returned
        {
            auto j = Journal::open(path);
            const int n = rng.uniform_int(1, 6);
            for (int i = 0; i < n; ++i) {
                const std::string payload = std::to_string(trial * 100 + i);
                j.append(payload, i);
                confirmed.push_back(payload);
            }
            j.sync_cycle(peer, 5000);
        }
        // crash during the NEXT write: only the in-flight tail record may
        // tear, everything before it was durable
        const auto before = read_bytes(path);
        {
            auto j = Journal::open(path);
            if (rng.uniform() < 0.5) {
                j.append("in-flight", 6000);  // never confirmed to the caller
            } else {
                ScriptedAcknowledger peer2(100);
                j.sync_cycle(peer2, 6000);  // mark records in flight
            }
        }
        auto full = read_bytes(path);
        if (full.size() > before.size()) {
            const std::size_t cut =
                before.size() +
                static_cast<std::size_t>(rng.below(full.size() - before.size()));
            full.resize(cut);
            write_bytes(path, full);
        }

        auto j = Journal::open(path);
        // every confirmed payload is visible locally or acknowledged remotely
        for (std::size_t i = 0; i < confirmed.size(); ++i) {
            const std::uint64_t seq = i + 1;
            const bool local_visible =
                std::any_of(j.entries().begin(), j.entries().end(),
                            [&](const JournalEntry& e) {
                                return e.seq == seq && e.payload == confirmed[i];
                            });
            const bool remote_has = peer.remote.count(seq) > 0;
            CHECK((local_visible || remote_has));
            CHECK(local_visible);  // appends were durable before sync ran
        }
    }
}

TEST_CASE("compact crash leaves either the old or the new file, never resurrects") {
    TempDir dir;
    constexpr std::int64_t kDay = 86400LL * 1000;
    const std::string path = dir.file("c.log");
    {
        auto j = Journal::open(path);
        j.append("a", 0);
        j.append("b", 0);
        ScriptedAcknowledger peer(2);
        j.sync_cycle(peer, 0);
        j.compact(1 * kDay, 10 * kDay);
        CHECK(j.entries().empty());
        j.append("c", 10 * kDay);
    }
    // a stray temp file from an interrupted later compaction must be ignored
    write_bytes(path + ".compact.tmp", {'g', 'a', 'r', 'b', 'a', 'g', 'e'});
    auto j = Journal::open(path);
    REQUIRE(j.entries().size() == 1);
    CHECK(j.entries()[0].payload == "c");
    CHECK(j.entries()[0].seq == 3);  // a and b never come back with old seqs
}

TEST_CASE("non-journal files are rejected") {
    TempDir dir;
    const std::string path = dir.file("not_a_journal.bin");
    write_bytes(path, {'n', 'o', 'p', 'e', 0, 0, 0, 0});
    CHECK_THROWS_AS(Journal::open(path), std::runtime_error);
}

TEST_CASE("file-drop acknowledger is idempotent per sequence number") {
    TempDir dir;
    const std::string peer_dir = dir.file("peer");
    fs::create_directories(peer_dir);
    auto j = Journal::open(dir.file("j.log"));
    j.append("one", 0);
    j.append("two", 0);
    FileDropAcknowledger peer(peer_dir);
    const auto r1 = j.sync_cycle(peer, 100);
    CHECK(r1.acked == 2);
    // force a duplicate delivery of seq 1..2: a fresh journal with same seqs
    auto j2 = Journal::open(dir.file("j2.log"));
    j2.append("one", 0);
    j2.append("two", 0);
    const auto r2 = j2.sync_cycle(peer, 200);
    CHECK(r2.acked == 2);
    std::size_t files = 0;
    for (auto it : fs::directory_iterator(peer_dir)) {
        (void)it;
        ++files;
    }
    CHECK(files == 2);  // overwritten, not duplicated
}
