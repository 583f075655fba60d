#pragma once

// Append-only event journal with sync marking and retention-based
// compaction. Records are length-prefixed and checksummed; a torn tail
// left by a crash is truncated away on open, so an append is either fully
// visible or absent. Synced entries never revert.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sxp/time.hpp"

namespace sxp {

struct JournalEntry {
    std::uint64_t seq = 0;
    Instant appended_at = 0;
    std::string payload;
    bool synced = false;
    std::optional<Instant> synced_at;
};

// Receiving side of a sync cycle. deliver() returns how many entries of
// the batch (as a prefix, in order) were accepted; it may throw to signal
// transport failure. Re-delivery of an already-accepted seq must be safe.
class Acknowledger {
public:
    virtual ~Acknowledger() = default;
    virtual std::size_t deliver(const std::vector<JournalEntry>& batch) = 0;
};

struct SyncReport {
    std::size_t sent = 0;
    std::size_t acked = 0;
    bool peer_ok = true;
    int retry_boost = 0;  // grows while syncs fail; signals "check more often"
};

class Journal {
public:
    // Opens or creates; truncates any torn tail. Throws std::runtime_error
    // on unusable files.
    static Journal open(const std::string& path);
    ~Journal();

    Journal(Journal&&) noexcept;
    Journal& operator=(Journal&&) noexcept;
    Journal(const Journal&) = delete;
    Journal& operator=(const Journal&) = delete;

    // Durable before return; returns the assigned sequence number
    // (previous max + 1, never reused even across compactions).
    std::uint64_t append(const std::string& payload, Instant now);

    // Sends unsynced entries in seq order and marks exactly the
    // acknowledged prefix. A transport failure marks nothing.
    SyncReport sync_cycle(Acknowledger& ack, Instant now);

    // Removes entries that are synced and whose synced_at is older than
    // the retention window. Unsynced entries are never removed. Returns
    // the removed count; the rewrite is atomic (write-temp + rename).
    std::size_t compact(std::int64_t retention_ms, Instant now);

    const std::vector<JournalEntry>& entries() const { return entries_; }
    std::size_t unsynced_count() const;
    int retry_boost() const { return retry_boost_; }
    const std::string& path() const { return path_; }

private:
    Journal() = default;
    void write_record(const std::vector<unsigned char>& record);

    std::string path_;
    int fd_ = -1;
    std::vector<JournalEntry> entries_;
    std::uint64_t next_seq_ = 1;
    int retry_boost_ = 0;
};

// In-process peer that drops payloads into a directory, one file per seq;
// re-delivery overwrites the same file. Used by the CLI demo and tests.
class FileDropAcknowledger : public Acknowledger {
public:
    explicit FileDropAcknowledger(std::string dir);
    std::size_t deliver(const std::vector<JournalEntry>& batch) override;

private:
    std::string dir_;
};

}  // namespace sxp
