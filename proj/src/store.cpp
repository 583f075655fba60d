#include "sxp/store.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

namespace sxp {

namespace {

constexpr char kMagic[4] = {'S', 'X', 'P', 'J'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderSize = 6;

constexpr std::uint8_t kRecData = 1;
constexpr std::uint8_t kRecMark = 2;
constexpr std::uint8_t kRecSeqFloor = 3;

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
}
void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}
void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back((v >> (8 * i)) & 0xff);
}
std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}
std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

// record = u8 type | u32 body_len | body | u32 crc32(type, body_len, body)
std::vector<unsigned char> encode_record(std::uint8_t type,
                                         const std::vector<unsigned char>& body) {
    std::vector<unsigned char> rec;
    rec.push_back(type);
    put_u32(rec, static_cast<std::uint32_t>(body.size()));
    rec.insert(rec.end(), body.begin(), body.end());
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, rec.data(), static_cast<uInt>(rec.size())));
    put_u32(rec, crc);
    return rec;
}

std::vector<unsigned char> encode_data(std::uint64_t seq, Instant at,
                                       const std::string& payload) {
    std::vector<unsigned char> body;
    put_u64(body, seq);
    put_u64(body, static_cast<std::uint64_t>(at));
    body.insert(body.end(), payload.begin(), payload.end());
    return encode_record(kRecData, body);
}

std::vector<unsigned char> encode_mark(std::uint64_t seq, Instant at) {
    std::vector<unsigned char> body;
    put_u64(body, seq);
    put_u64(body, static_cast<std::uint64_t>(at));
    return encode_record(kRecMark, body);
}

std::vector<unsigned char> encode_seq_floor(std::uint64_t last_seq) {
    std::vector<unsigned char> body;
    put_u64(body, last_seq);
    return encode_record(kRecSeqFloor, body);
}

}  // namespace

Journal::~Journal() {
    if (fd_ >= 0) ::close(fd_);
}

Journal::Journal(Journal&& other) noexcept { *this = std::move(other); }

Journal& Journal::operator=(Journal&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        path_ = std::move(other.path_);
        fd_ = other.fd_;
        other.fd_ = -1;
        entries_ = std::move(other.entries_);
        next_seq_ = other.next_seq_;
        retry_boost_ = other.retry_boost_;
    }
    return *this;
}

Journal Journal::open(const std::string& path) {
    Journal j;
    j.path_ = path;

    std::vector<unsigned char> raw;
    {
        std::ifstream in(path, std::ios::binary);
        if (in)
            raw.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    std::size_t good = 0;
    std::map<std::uint64_t, std::size_t> by_seq;
    std::uint64_t seq_floor = 0;
    if (raw.size() >= kHeaderSize && std::memcmp(raw.data(), kMagic, 4) == 0 &&
        (raw[4] | (raw[5] << 8)) == kVersion) {
        good = kHeaderSize;
        std::size_t pos = kHeaderSize;
        while (pos + 9 <= raw.size()) {
            const std::uint8_t type = raw[pos];
            const std::uint32_t body_len = get_u32(raw.data() + pos + 1);
            const std::size_t total = 1 + 4 + body_len + 4;
            if (pos + total > raw.size()) break;  // torn tail
            const auto crc_stored = get_u32(raw.data() + pos + 1 + 4 + body_len);
            const auto crc_actual = static_cast<std::uint32_t>(
                crc32(0L, raw.data() + pos, static_cast<uInt>(1 + 4 + body_len)));
            if (crc_stored != crc_actual) break;
            const unsigned char* body = raw.data() + pos + 5;
            if (type == kRecData && body_len >= 16) {
                JournalEntry e;
                e.seq = get_u64(body);
                e.appended_at = static_cast<Instant>(get_u64(body + 8));
                e.payload.assign(reinterpret_cast<const char*>(body + 16), body_len - 16);
                by_seq[e.seq] = j.entries_.size();
                j.entries_.push_back(std::move(e));
            } else if (type == kRecMark && body_len >= 16) {
                const std::uint64_t seq = get_u64(body);
                auto it = by_seq.find(seq);
                if (it != by_seq.end()) {
                    j.entries_[it->second].synced = true;
                    j.entries_[it->second].synced_at =
                        static_cast<Instant>(get_u64(body + 8));
                }
            } else if (type == kRecSeqFloor && body_len >= 8) {
                seq_floor = std::max(seq_floor, get_u64(body));
            } else {
                break;  // unknown record type: treat as corruption tail
            }
            pos += total;
            good = pos;
        }
    } else if (!raw.empty() && raw.size() >= 4 && std::memcmp(raw.data(), kMagic, 4) != 0) {
        throw std::runtime_error("not a journal file: " + path);
    }

    std::uint64_t max_seq = seq_floor;
    for (const auto& e : j.entries_) max_seq = std::max(max_seq, e.seq);
    j.next_seq_ = max_seq + 1;
    std::sort(j.entries_.begin(), j.entries_.end(),
              [](const JournalEntry& a, const JournalEntry& b) { return a.seq < b.seq; });

    j.fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (j.fd_ < 0) throw std::runtime_error("cannot open journal: " + path);
    if (raw.size() < kHeaderSize) {
        std::vector<unsigned char> header(kMagic, kMagic + 4);
        put_u16(header, kVersion);
        if (::pwrite(j.fd_, header.data(), header.size(), 0) !=
            static_cast<ssize_t>(header.size()))
            throw std::runtime_error("cannot initialize journal: " + path);
        if (::ftruncate(j.fd_, static_cast<off_t>(kHeaderSize)) != 0)
            throw std::runtime_error("cannot initialize journal: " + path);
    } else if (good < raw.size()) {
        if (::ftruncate(j.fd_, static_cast<off_t>(good)) != 0)
            throw std::runtime_error("cannot truncate torn journal tail: " + path);
    }
    ::fsync(j.fd_);
    return j;
}

void Journal::write_record(const std::vector<unsigned char>& record) {
    const off_t end = ::lseek(fd_, 0, SEEK_END);
    if (end < 0) throw std::runtime_error("journal seek failed");
    const ssize_t written = ::write(fd_, record.data(), record.size());
    if (written != static_cast<ssize_t>(record.size())) {
        // roll back the partial write so the in-memory state stays truthful
        ::ftruncate(fd_, end);
        throw std::runtime_error("journal write failed");
    }
    if (::fsync(fd_) != 0) {
        ::ftruncate(fd_, end);
        throw std::runtime_error("journal fsync failed");
    }
}

std::uint64_t Journal::append(const std::string& payload, Instant now) {
    const std::uint64_t seq = next_seq_;
    write_record(encode_data(seq, now, payload));
    JournalEntry e;
    e.seq = seq;
    e.appended_at = now;
    e.payload = payload;
    entries_.push_back(std::move(e));
    next_seq_ = seq + 1;
    return seq;
}

std::size_t Journal::unsynced_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_)
        if (!e.synced) ++n;
    return n;
}

SyncReport Journal::sync_cycle(Acknowledger& ack, Instant now) {
    SyncReport report;
    std::vector<JournalEntry> batch;
    std::vector<std::size_t> batch_index;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!entries_[i].synced) {
            batch.push_back(entries_[i]);
            batch_index.push_back(i);
        }
    }
    report.sent = batch.size();
    if (batch.empty()) {
        retry_boost_ = 0;
        report.retry_boost = 0;
        return report;
    }
    std::size_t acked = 0;
    try {
        acked = std::min(ack.deliver(batch), batch.size());
    } catch (const std::exception&) {
        report.peer_ok = false;
        report.retry_boost = ++retry_boost_;
        return report;
    }
    for (std::size_t i = 0; i < acked; ++i) {
        write_record(encode_mark(batch[i].seq, now));
        entries_[batch_index[i]].synced = true;
        entries_[batch_index[i]].synced_at = now;
    }
    report.acked = acked;
    if (acked == batch.size()) {
        retry_boost_ = 0;
    } else {
        ++retry_boost_;  // partial ack: press the retry schedule
    }
    report.retry_boost = retry_boost_;
    return report;
}

std::size_t Journal::compact(std::int64_t retention_ms, Instant now) {
    std::vector<JournalEntry> keep;
    std::size_t removed = 0;
    for (auto& e : entries_) {
        if (e.synced && e.synced_at && now - *e.synced_at > retention_ms) {
            ++removed;
        } else {
            keep.push_back(std::move(e));
        }
    }
    if (removed == 0) {
        entries_ = std::move(keep);
        return 0;
    }

    const std::string tmp = path_ + ".compact.tmp";
    {
        const int tfd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (tfd < 0) throw std::runtime_error("cannot open compaction temp: " + tmp);
        std::vector<unsigned char> blob(kMagic, kMagic + 4);
        put_u16(blob, kVersion);
        const auto floor_rec = encode_seq_floor(next_seq_ - 1);
        blob.insert(blob.end(), floor_rec.begin(), floor_rec.end());
        for (const auto& e : keep) {
            const auto data = encode_data(e.seq, e.appended_at, e.payload);
            blob.insert(blob.end(), data.begin(), data.end());
            if (e.synced) {
                const auto mark = encode_mark(e.seq, e.synced_at.value_or(now));
                blob.insert(blob.end(), mark.begin(), mark.end());
            }
        }
        const ssize_t written = ::write(tfd, blob.data(), blob.size());
        const bool ok = written == static_cast<ssize_t>(blob.size()) && ::fsync(tfd) == 0;
        ::close(tfd);
        if (!ok) {
            ::unlink(tmp.c_str());
            throw std::runtime_error("compaction write failed: " + tmp);
        }
    }
    if (::rename(tmp.c_str(), path_.c_str()) != 0) {
        ::unlink(tmp.c_str());
        throw std::runtime_error("compaction rename failed: " + path_);
    }
    ::close(fd_);
    fd_ = ::open(path_.c_str(), O_RDWR, 0644);
    if (fd_ < 0) throw std::runtime_error("cannot reopen compacted journal: " + path_);
    ::fsync(fd_);
    entries_ = std::move(keep);
    return removed;
}

FileDropAcknowledger::FileDropAcknowledger(std::string dir) : dir_(std::move(dir)) {}

std::size_t FileDropAcknowledger::deliver(const std::vector<JournalEntry>& batch) {
    std::size_t accepted = 0;
    for (const auto& e : batch) {
        const std::string path = dir_ + "/" + std::to_string(e.seq) + ".event";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) break;
        out << e.payload;
        if (!out.flush()) break;
        ++accepted;
    }
    if (accepted == 0 && !batch.empty())
        throw std::runtime_error("peer directory not writable: " + dir_);
    return accepted;
}

}  // namespace sxp
