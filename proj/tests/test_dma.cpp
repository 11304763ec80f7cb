#include "doctest.h"

#include <set>

#include "core/prng.hpp"
#include "env_fixture.hpp"

using namespace vdf;
using vdf_test::EnvFixture;

namespace {

struct DmaFixture : EnvFixture {
    explicit DmaFixture(std::vector<u8> data = {}, u64 seed = 1)
        : EnvFixture(vdf_test::passthrough_pci_config(), std::move(data),
                     seed) {}
};

}  // namespace

TEST_CASE("mapping registers and returns a pool address") {
    DmaFixture fx;
    fx.run([&] {
        AllocHandle h = fx.env.galloc(256, 1);
        u64 dma = fx.env.map_streaming(fx.env.alloc_base(h), 256,
                                       DmaDirection::FromDevice, 2);
        CHECK(addr_space(dma) == AddrSpace::Shared);
        CHECK(fx.env.dma_layer().is_mapped(dma));
        CHECK(fx.env.dma_layer().mapping(dma)->len == 256);
    });
}

TEST_CASE("two mappings occupy disjoint slots") {
    DmaFixture fx;
    fx.run([&] {
        AllocHandle a = fx.env.galloc(0x1000, 1);
        AllocHandle b = fx.env.galloc(0x800, 1);
        u64 da = fx.env.map_streaming(fx.env.alloc_base(a), 0x1000,
                                      DmaDirection::FromDevice, 2);
        u64 db = fx.env.map_streaming(fx.env.alloc_base(b), 0x800,
                                      DmaDirection::FromDevice, 2);
        CHECK(da != db);
        bool disjoint = da + 0x1000 <= db || db + 0x800 <= da;
        CHECK(disjoint);
    });
}

TEST_CASE("to-device mappings copy the private bytes immediately") {
    DmaFixture fx;
    fx.run([&] {
        AllocHandle h = fx.env.galloc(16, 1);
        u64 base = fx.env.alloc_base(h);
        std::vector<u8> pattern = {1, 2, 3, 4, 5, 6, 7, 8,
                                   9, 10, 11, 12, 13, 14, 15, 16};
        fx.env.mem_write(base, pattern, 1);
        u64 dma = fx.env.map_streaming(base, 16, DmaDirection::ToDevice, 2);
        u8 shared[16];
        REQUIRE(fx.env.mem().shared().raw_read(dma, 16, shared));
        CHECK(std::vector<u8>(shared, shared + 16) == pattern);
    });
}

TEST_CASE("oversized mapping requests are environment errors") {
    DmaFixture fx;
    auto r = fx.run([&] {
        AllocHandle h = fx.env.galloc(64, 1);
        // One byte more than the whole pool can ever hold.
        fx.env.map_streaming(fx.env.alloc_base(h), SharedSpace::kPoolSize + 1,
                             DmaDirection::FromDevice, 2);
    });
    CHECK(r.kind == Scheduler::RunResult::Kind::EnvError);
    CHECK(fx.sink.events.empty());
}

TEST_CASE("unmap of a never-mapped address is rejected and reported") {
    DmaFixture fx;
    auto r = fx.run([&] {
        fx.env.unmap_streaming(kSharedBase + 0x100, 64,
                               DmaDirection::FromDevice, 3);
        // The rejection is warning-grade: execution continues.
        fx.env.cov(1);
    });
    CHECK(r.kind == Scheduler::RunResult::Kind::Completed);
    REQUIRE(fx.sink.events.size() == 1);
    CHECK(fx.sink.events[0].kind == EventKind::RejectedUnmap);
}

TEST_CASE("unmap rejection covers random unmapped addresses completely") {
    DmaFixture fx;
    Xorshift64Star prng(99);
    fx.run([&] {
        AllocHandle h = fx.env.galloc(128, 1);
        u64 mapped = fx.env.map_streaming(fx.env.alloc_base(h), 128,
                                          DmaDirection::FromDevice, 2);
        size_t rejected = 0;
        constexpr int kProbes = 1000;
        for (int i = 0; i < kProbes; ++i) {
            u64 addr = kSharedBase + prng.next() % SharedSpace::kPoolSize;
            if (addr == mapped)
                continue;
            size_t before = fx.sink.events.size();
            fx.env.unmap_streaming(addr, 16, DmaDirection::FromDevice, 3);
            if (fx.sink.events.size() == before + 1 &&
                fx.sink.events.back().kind == EventKind::RejectedUnmap)
                ++rejected;
            else
                break;
        }
        CHECK(rejected + 1 >= kProbes);  // every probe (minus a collision skip)
        CHECK(fx.env.dma_layer().is_mapped(mapped));
    });
}

TEST_CASE("exact-length unmap bounces cleanly") {
    DmaFixture fx;
    fx.run([&] {
        AllocHandle h = fx.env.galloc(64, 1);
        u64 base = fx.env.alloc_base(h);
        u64 dma = fx.env.map_streaming(base, 64, DmaDirection::FromDevice, 2);
        std::vector<u8> device_data(64, 0x5A);
        fx.env.mem().shared().raw_write(dma, device_data);
        fx.env.unmap_streaming(dma, 64, DmaDirection::FromDevice, 2);
        CHECK(!fx.env.dma_layer().is_mapped(dma));
        CHECK(fx.env.mem_read(base, 64, 2) == device_data);
    });
    CHECK(fx.sink.events.empty());
}

TEST_CASE("over-length bounce reports intent and clamps the copy") {
    DmaFixture fx;
    auto r = fx.run([&] {
        AllocHandle guard_lo = fx.env.galloc(32, 1);
        AllocHandle h = fx.env.galloc(0x1000, 1);
        AllocHandle guard_hi = fx.env.galloc(32, 1);
        (void)guard_lo;
        u64 base = fx.env.alloc_base(h);
        u64 dma = fx.env.map_streaming(base, 0x1000,
                                       DmaDirection::FromDevice, 2);
        std::vector<u8> device_data(0x1000, 0x77);
        fx.env.mem().shared().raw_write(dma, device_data);
        // Claimed length exceeds the registered mapping by 0x1000.
        fx.env.unmap_streaming(dma, 0x2000, DmaDirection::FromDevice, 4);
        (void)guard_hi;
    });
    CHECK(r.kind == Scheduler::RunResult::Kind::Aborted);
    REQUIRE(fx.sink.events.size() == 1);
    CHECK(fx.sink.events[0].kind == EventKind::OverLengthBounce);
    CHECK(fx.sink.events[0].site == 4);
    // The clamp kept the copy inside the registered mapping; the neighbour
    // allocation would have been a use-after-redzone otherwise.
    CHECK(!fx.env.dma_layer().is_mapped(kSharedBase));
}

TEST_CASE("sync fills the private buffer with the next stream bytes") {
    DmaFixture fx({}, 123);
    fx.run([&] {
        AllocHandle h = fx.env.galloc(16, 1);
        u64 base = fx.env.alloc_base(h);
        u64 dma = fx.env.map_streaming(base, 16, DmaDirection::FromDevice, 2);

        InputStream expect_stream({}, 123, 10240);
        auto expect_a = expect_stream.take(16);
        auto expect_b = expect_stream.take(16);

        fx.env.sync_for_cpu(dma, 16, 2);
        CHECK(fx.env.mem_read(base, 16, 2) == expect_a);
        fx.env.sync_for_cpu(dma, 16, 2);
        CHECK(fx.env.mem_read(base, 16, 2) == expect_b);
        CHECK(fx.env.injected_bytes() == 32);
    });
}

TEST_CASE("over-length sync reports out-of-bounds intent") {
    DmaFixture fx;
    auto r = fx.run([&] {
        AllocHandle h = fx.env.galloc(0x100, 1);
        u64 dma = fx.env.map_streaming(fx.env.alloc_base(h), 0x100,
                                       DmaDirection::FromDevice, 2);
        fx.env.sync_for_cpu(dma, 0x101, 6);
    });
    CHECK(r.kind == Scheduler::RunResult::Kind::Aborted);
    REQUIRE(fx.sink.events.size() == 1);
    CHECK(fx.sink.events[0].kind == EventKind::OverLengthBounce);
}

TEST_CASE("coherent regions are shared and stable in emulated mode") {
    DeviceConfig cfg;
    cfg.bus = BusKind::Virtio;
    cfg.mode = SimMode::Emulated;
    cfg.virtio_device_id = 1;
    cfg.regions = {{0, 0x300, RegionKind::Mmio}};
    EnvFixture fx(cfg);
    fx.run([&] {
        u64 base = fx.env.alloc_coherent(4096, 1);
        CHECK(addr_space(base) == AddrSpace::Shared);
        std::vector<u8> data = {0xDE, 0xAD, 0xBE, 0xEF};
        fx.env.coherent_write(base, 8, data, 1);
        CHECK(fx.env.coherent_read(base, 8, 4, 1) == data);
        // Device-side view matches without any bounce.
        u8 dev[4];
        REQUIRE(fx.env.mem().shared().raw_read(base + 8, 4, dev));
        CHECK(std::vector<u8>(dev, dev + 4) == data);
    });
}

TEST_CASE("coherent reads in passthrough mode inject fresh stream data") {
    DmaFixture fx({}, 77);
    fx.run([&] {
        u64 base = fx.env.alloc_coherent(64, 1);
        InputStream expect_stream({}, 77, 10240);
        auto first = expect_stream.take(8);
        auto second = expect_stream.take(8);
        CHECK(fx.env.coherent_read(base, 0, 8, 1) == first);
        // Same offset, fresh draw.
        CHECK(fx.env.coherent_read(base, 0, 8, 1) == second);
    });
}

TEST_CASE("out-of-region coherent access is a violation") {
    DmaFixture fx;
    auto r = fx.run([&] {
        u64 base = fx.env.alloc_coherent(32, 1);
        fx.env.coherent_read(base, 30, 8, 9);
    });
    CHECK(r.kind == Scheduler::RunResult::Kind::Aborted);
    REQUIRE(!fx.sink.events.empty());
    CHECK(fx.sink.events[0].kind == EventKind::UnmappedAccess);
}

TEST_CASE("registry matches a shadow log over random map/unmap traffic") {
    DmaFixture fx;
    fx.run([&] {
        Xorshift64Star prng(5);
        std::set<u64> shadow;
        std::vector<std::pair<u64, u64>> live;  // dma addr, len
        for (int step = 0; step < 400; ++step) {
            bool do_map = live.empty() || (prng.next() % 2 == 0);
            if (do_map && live.size() < 16) {
                u64 len = 1 + prng.next() % 0x800;
                AllocHandle h = fx.env.galloc(len, 1);
                u64 dma = fx.env.map_streaming(fx.env.alloc_base(h), len,
                                               DmaDirection::FromDevice, 1);
                shadow.insert(dma);
                live.push_back({dma, len});
            } else if (!live.empty()) {
                size_t pick = prng.next() % live.size();
                auto [dma, len] = live[pick];
                live.erase(live.begin() + static_cast<ptrdiff_t>(pick));
                fx.env.unmap_streaming(dma, len, DmaDirection::FromDevice, 1);
                shadow.erase(dma);
            }
            CHECK(fx.env.dma_layer().mapped_count() == shadow.size());
            for (u64 a : shadow)
                CHECK(fx.env.dma_layer().is_mapped(a));
        }
    });
    CHECK(fx.sink.events.empty());
}
