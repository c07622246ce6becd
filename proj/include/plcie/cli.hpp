// Copyright 2026 the plcie authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plcie/channel.hpp"
#include "plcie/container.hpp"
#include "plcie/errors.hpp"
#include "plcie/image.hpp"
#include "plcie/keyschedule.hpp"
#include "plcie/pipeline.hpp"
#include "plcie/statistics.hpp"

namespace plcie::cli {

namespace detail {

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed,
                                  std::ostream& err) {
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t drawn = (std::uint64_t(rd()) << 32) ^ rd();
    err << "seed: " << drawn << "\n";
    return drawn;
}

inline std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return data;
}

inline void write_binary_file(const std::string& path,
                              const std::vector<std::uint8_t>& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open output file: " + path);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw FormatError("failed writing file: " + path);
}

inline KeyMaterial load_key(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open key file: " + path);
    return read_key_file(in);
}

} // namespace detail

/// Parses and runs one invocation.  args excludes the program name.
/// Exit codes: 0 success, 2 usage, 3 malformed input, 4 key or
/// constraint rejection.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Self-synchronizing stream cipher for grayscale images"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed, "Seed for every random draw; omit for fresh entropy");

    // keygen
    auto* keygen = app.add_subcommand("keygen", "Draw a fresh key and write the key file");
    keygen->fallthrough();
    std::string keygen_out;
    unsigned keygen_prec = 16;
    std::optional<std::size_t> keygen_triples;
    keygen->add_option("--out", keygen_out, "Key file path")->required();
    keygen->add_option("--prec", keygen_prec, "Chaotic source precision")
        ->check(CLI::IsMember({16u, 32u}));
    keygen->add_option("--triples", keygen_triples, "Keyed entries in the injection matrix");

    // encrypt
    auto* encrypt = app.add_subcommand("encrypt", "Encrypt a PGM image into a container");
    encrypt->fallthrough();
    std::string enc_key, enc_in, enc_out;
    unsigned enc_iota = 0;
    encrypt->add_option("--key", enc_key, "Key file path")->required();
    encrypt->add_option("--in", enc_in, "Input PGM image")->required();
    encrypt->add_option("--out", enc_out, "Output container path")->required();
    encrypt->add_option("--iota", enc_iota, "Whitening symbols (0 = default 4*ell)");

    // decrypt
    auto* decrypt = app.add_subcommand("decrypt", "Decrypt a container back into a PGM image");
    decrypt->fallthrough();
    std::string dec_key, dec_in, dec_out;
    decrypt->add_option("--key", dec_key, "Key file path")->required();
    decrypt->add_option("--in", dec_in, "Input container path")->required();
    decrypt->add_option("--out", dec_out, "Output PGM path")->required();

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Statistics battery for a PGM image");
    analyze->fallthrough();
    std::string ana_in, ana_ref;
    std::size_t ana_pairs = 2500;
    analyze->add_option("--in", ana_in, "Image to analyze")->required();
    analyze->add_option("--ref", ana_ref, "Reference image for difference metrics");
    analyze->add_option("--pairs", ana_pairs, "Sampled adjacent pixel pairs per direction");

    // channel
    auto* channel = app.add_subcommand(
        "channel", "Corrupt encrypted symbols and measure resynchronization");
    channel->fallthrough();
    std::string ch_key, ch_in;
    unsigned ch_events = 8;
    std::size_t ch_symbols = 4096;
    channel->add_option("--key", ch_key, "Key file path")->required();
    channel->add_option("--in", ch_in, "Input PGM image")->required();
    channel->add_option("--events", ch_events, "Isolated corruption events to measure");
    channel->add_option("--symbols", ch_symbols,
                        "Truncate the stream to this many symbols (0 = full image)");

    // bench
    auto* bench = app.add_subcommand("bench", "Throughput and field-operation cost");
    bench->fallthrough();
    std::size_t bench_symbols = 65536;
    bench->add_option("--symbols", bench_symbols, "Payload symbols to process");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        const Field field = Field::gf16();

        if (keygen->parsed()) {
            std::mt19937_64 rng(detail::resolve_seed(seed, err));
            const KeyMaterial key = generate_key(keygen_prec, rng, keygen_triples);
            const KeyBits bits = serialize_key(key);
            std::ofstream f(keygen_out);
            if (!f) throw FormatError("cannot open output file: " + keygen_out);
            write_key_file(key, f);
            f.flush();
            if (!f) throw FormatError("failed writing file: " + keygen_out);
            out << "key: " << bits.bit_count << " bits, precision " << key.prec
                << ", triples " << key.triples.size() << "\n";
            return 0;
        }

        if (encrypt->parsed()) {
            std::mt19937_64 rng(detail::resolve_seed(seed, err));
            const KeyMaterial key = detail::load_key(enc_key);
            const CipherParams params =
                derive_params(key, field, CipherMode::self_synchronous, 8, enc_iota);
            const GrayImage img = read_pgm_file(enc_in);
            const InitVector iv = random_iv(params.ell(), field, rng);
            const auto whitening = random_whitening(params.iota(), field, rng);
            const CipherContainer c = encrypt_image(params, key.prec, img, iv, whitening);
            detail::write_binary_file(enc_out, encode_container(c));
            out << "encrypted " << img.width << "x" << img.height << " image into "
                << c.cipher_symbols.size() << " symbols\n";
            return 0;
        }

        if (decrypt->parsed()) {
            const KeyMaterial key = detail::load_key(dec_key);
            const CipherParams params = derive_params(key, field, CipherMode::self_synchronous);
            const CipherContainer c = decode_container(detail::read_binary_file(dec_in));
            const GrayImage img = decrypt_image(params, key.prec, c);
            write_pgm_file(img, dec_out);
            out << "decrypted to " << img.width << "x" << img.height << " image\n";
            return 0;
        }

        if (analyze->parsed()) {
            std::mt19937_64 rng(detail::resolve_seed(seed, err));
            const GrayImage img = read_pgm_file(ana_in);
            nlohmann::json j;
            j["image"] = {{"width", img.width}, {"height", img.height}};
            j["entropy"] = {{"bit", entropy_bits(img, 1)},
                            {"nibble", entropy_bits(img, 4)},
                            {"byte", entropy_bits(img, 8)}};
            j["correlation"] = {
                {"horizontal",
                 adjacent_correlation(img, Direction::horizontal, ana_pairs, rng)},
                {"vertical", adjacent_correlation(img, Direction::vertical, ana_pairs, rng)},
                {"diagonal", adjacent_correlation(img, Direction::diagonal, ana_pairs, rng)}};
            j["histogram"] = histogram(img);
            if (!ana_ref.empty()) {
                const GrayImage ref = read_pgm_file(ana_ref);
                j["npcr_vs_ref"] = npcr(img, ref);
                j["uaci_vs_ref"] = uaci(img, ref);
            }
            out << j.dump(2) << "\n";
            return 0;
        }

        if (channel->parsed()) {
            std::mt19937_64 rng(detail::resolve_seed(seed, err));
            if (ch_events == 0) throw std::invalid_argument("need at least one event");
            const KeyMaterial key = detail::load_key(ch_key);
            const CipherParams params = derive_params(key, field, CipherMode::self_synchronous);
            const GrayImage img = read_pgm_file(ch_in);
            std::vector<std::uint8_t> symbols = bytes_to_symbols(img.pixels);
            if (ch_symbols != 0 && symbols.size() > ch_symbols) {
                symbols.resize(ch_symbols);
            }
            const InitVector iv = random_iv(params.ell(), field, rng);
            nlohmann::json reports = nlohmann::json::array();
            std::size_t max_delay = 0;
            double mean_delay = 0.0;
            std::size_t bound = 0;
            bool all_within = true;
            for (unsigned e = 0; e < ch_events; ++e) {
                const auto idx =
                    static_cast<std::size_t>(uniform_below(rng, symbols.size()));
                const ResyncReport r = measure_resync(params, iv, symbols, idx, rng);
                bound = r.bound;
                max_delay = std::max(max_delay, r.delay);
                mean_delay += double(r.delay);
                all_within = all_within && r.delay <= r.bound;
                reports.push_back({{"vector", r.corrupted_vector},
                                   {"component", r.component},
                                   {"first_wrong", r.first_wrong},
                                   {"resync_index", r.resync_index},
                                   {"delay", r.delay},
                                   {"wrong_outputs", r.wrong_outputs}});
            }
            mean_delay /= double(ch_events);
            nlohmann::json j;
            j["events"] = ch_events;
            j["stream_symbols"] = symbols.size();
            j["bound"] = bound;
            j["max_delay"] = max_delay;
            j["mean_delay"] = mean_delay;
            j["all_within_bound"] = all_within;
            j["reports"] = reports;
            out << j.dump(2) << "\n";
            return 0;
        }

        if (bench->parsed()) {
            std::mt19937_64 rng(detail::resolve_seed(seed, err));
            const KeyMaterial key = generate_key(16, rng);
            const CipherParams params = derive_params(key, field, CipherMode::self_synchronous);
            const BenchReport r = bench_throughput(params, bench_symbols, rng);
            nlohmann::json j;
            j["payload_symbols"] = r.payload_symbols;
            j["total_steps"] = r.total_steps;
            j["encrypt_field_ops"] = r.encrypt_field_ops;
            j["decrypt_field_ops"] = r.decrypt_field_ops;
            j["encrypt_ops_per_symbol"] = r.encrypt_ops_per_symbol;
            j["decrypt_ops_per_symbol"] = r.decrypt_ops_per_symbol;
            j["encrypt_ops_per_bit"] = r.encrypt_ops_per_bit;
            j["encrypt_seconds"] = r.encrypt_seconds;
            j["decrypt_seconds"] = r.decrypt_seconds;
            j["encrypt_symbols_per_second"] = r.encrypt_symbols_per_second;
            out << j.dump(2) << "\n";
            return 0;
        }
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const KeyError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const SingularMatrixError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace plcie::cli
