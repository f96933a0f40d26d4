/*
 * Copyright 2026 The Forgeflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "forgeflow/items/zip_writer.hpp"

#include <zlib.h>

#include <limits>

#include "forgeflow/error.hpp"

namespace forgeflow::items {

namespace {

constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01
constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kUtf8Names = 1 << 11;
constexpr std::uint16_t kDeflate = 8;
constexpr std::uint16_t kVersion = 20;

void put16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string deflate_raw(std::string_view data) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw Error(ErrorCode::IoFailure, "deflateInit2 failed");
    }
    std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&zs, Z_FINISH);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw Error(ErrorCode::IoFailure, "deflate failed");
    return out;
}

}  // namespace

std::uint32_t crc32_of(std::string_view data) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

std::string build_zip(const std::vector<ZipEntry>& entries) {
    constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
    std::string archive;
    std::string central;
    for (const auto& e : entries) {
        if (e.data.size() >= kMax || e.name.size() >= 0xffff) {
            throw Error(ErrorCode::IoFailure, "entry too large for a ZIP archive: " + e.name);
        }
        auto compressed = deflate_raw(e.data);
        auto crc = crc32_of(e.data);
        auto offset = archive.size();
        if (offset >= kMax) throw Error(ErrorCode::IoFailure, "archive too large");

        put32(archive, 0x04034b50);
        put16(archive, kVersion);
        put16(archive, kUtf8Names);
        put16(archive, kDeflate);
        put16(archive, kDosTime);
        put16(archive, kDosDate);
        put32(archive, crc);
        put32(archive, static_cast<std::uint32_t>(compressed.size()));
        put32(archive, static_cast<std::uint32_t>(e.data.size()));
        put16(archive, static_cast<std::uint16_t>(e.name.size()));
        put16(archive, 0);
        archive += e.name;
        archive += compressed;

        put32(central, 0x02014b50);
        put16(central, (3 << 8) | kVersion);  // made by: unix
        put16(central, kVersion);
        put16(central, kUtf8Names);
        put16(central, kDeflate);
        put16(central, kDosTime);
        put16(central, kDosDate);
        put32(central, crc);
        put32(central, static_cast<std::uint32_t>(compressed.size()));
        put32(central, static_cast<std::uint32_t>(e.data.size()));
        put16(central, static_cast<std::uint16_t>(e.name.size()));
        put16(central, 0);  // extra
        put16(central, 0);  // comment
        put16(central, 0);  // disk
        put16(central, 0);  // internal attrs
        put32(central, 0100644u << 16);
        put32(central, static_cast<std::uint32_t>(offset));
        central += e.name;
    }
    if (entries.size() >= 0xffff) throw Error(ErrorCode::IoFailure, "too many entries for a ZIP archive");
    auto central_offset = archive.size();
    archive += central;
    put32(archive, 0x06054b50);
    put16(archive, 0);
    put16(archive, 0);
    put16(archive, static_cast<std::uint16_t>(entries.size()));
    put16(archive, static_cast<std::uint16_t>(entries.size()));
    put32(archive, static_cast<std::uint32_t>(central.size()));
    put32(archive, static_cast<std::uint32_t>(central_offset));
    put16(archive, 0);
    return archive;
}

}  // namespace forgeflow::items
