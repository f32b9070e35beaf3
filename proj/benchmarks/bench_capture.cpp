#include <benchmark/benchmark.h>

#include <sstream>

#include "burrscan/capture.hpp"
#include "burrscan/dns_wire.hpp"

namespace {

using namespace burrscan;

std::vector<std::uint8_t> capture_of(int packets) {
  std::ostringstream out(std::ios::binary);
  CaptureWriter w(out);
  const std::array<std::uint8_t, 4> client{10, 1, 2, 3}, resolver{10, 0, 0, 53};
  for (int i = 0; i < packets; ++i) {
    const auto dns = build_dns_query(static_cast<std::uint16_t>(i), "host" + std::to_string(i) + ".example.com");
    w.write_packet(i * 1000, build_udp_frame(client, resolver, 40000, 53, dns));
  }
  const std::string s = out.str();
  return {s.begin(), s.end()};
}

void BM_ParseCapture(benchmark::State& state) {
  const auto bytes = capture_of(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto reader = CaptureReader::from_bytes(bytes);
    std::size_t n = 0;
    while (auto r = reader.next()) ++n;
    benchmark::DoNotOptimize(n);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_ParseCapture)->Arg(10'000);

void BM_DecodeQname(benchmark::State& state) {
  const auto wire = encode_qname("mail.internal.example.co.uk");
  for (auto _ : state) benchmark::DoNotOptimize(decode_qname(wire, 0));
}
BENCHMARK(BM_DecodeQname);

}  // namespace

BENCHMARK_MAIN();
