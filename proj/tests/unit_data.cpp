#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "gradsec/data.hpp"
#include "gradsec/error.hpp"

using namespace gradsec;

namespace {

std::string temp_path(const std::string& name) {
    return std::string("/tmp/gradsec_test_") + name;
}

}  // namespace

TEST_CASE("synthetic data is deterministic, balanced, and clipped") {
    SynthSpec spec;
    spec.classes = 4;
    spec.height = 8;
    spec.width = 8;
    spec.channels = 1;
    spec.noise_sigma = 0.3;
    Dataset a = synth_generate(spec, 40, 5);
    Dataset b = synth_generate(spec, 40, 5);
    CHECK(bitwise_equal(a.images, b.images));
    CHECK(bitwise_equal(a.labels, b.labels));
    Dataset c = synth_generate(spec, 40, 6);
    CHECK_FALSE(bitwise_equal(a.images, c.images));

    CHECK(a.size() == 40);
    CHECK(a.classes() == 4);
    std::vector<int> per_class(4, 0);
    for (int r = 0; r < 40; ++r) ++per_class[std::size_t(a.label_of(r))];
    for (int cnt : per_class) CHECK(cnt == 10);
    for (float v : a.images.data) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
    // one-hot labels
    for (int r = 0; r < 40; ++r) {
        float sum = 0.0f;
        for (int k = 0; k < 4; ++k) sum += a.labels.data[std::size_t(r) * 4 + k];
        CHECK(sum == 1.0f);
    }
}

TEST_CASE("property blending flags rows and changes pixels") {
    SynthSpec spec;
    spec.with_property = true;
    spec.blend = 0.5;

    spec.prevalence = 1.0;
    Dataset all = synth_generate(spec, 12, 9);
    REQUIRE(all.has_property());
    for (std::uint8_t f : all.property_flags) CHECK(f == 1);

    spec.prevalence = 0.0;
    Dataset none = synth_generate(spec, 12, 9);
    for (std::uint8_t f : none.property_flags) CHECK(f == 0);

    // flagged rows differ from their unflagged twins
    CHECK_FALSE(bitwise_equal(all.images, none.images));

    Tensor pat = default_property_pattern(8, 8, 1);
    CHECK(pat.shape == std::vector<int>{8, 8, 1});
}

TEST_CASE("subset and concat keep rows intact") {
    SynthSpec spec;
    Dataset d = synth_generate(spec, 10, 3);
    Dataset sub = d.subset({1, 4, 7});
    CHECK(sub.size() == 3);
    for (int i = 0; i < 8 * 8; ++i)
        CHECK(sub.images.data[std::size_t(i)] == d.images.data[std::size_t(64 + i)]);
    CHECK(sub.label_of(0) == d.label_of(1));

    Dataset both = Dataset::concat(sub, sub);
    CHECK(both.size() == 6);
    CHECK(both.label_of(3) == sub.label_of(0));
}

TEST_CASE("iid partition deals every row exactly once") {
    SynthSpec spec;
    Dataset d = synth_generate(spec, 13, 4);
    std::vector<Dataset> shards = partition(d, 3, PartitionMode::Iid, 8);
    REQUIRE(shards.size() == 3);
    int total = 0;
    for (const Dataset& s : shards) {
        total += s.size();
        CHECK(s.size() >= 4);  // 13 rows over 3 clients: sizes 5/4/4
        CHECK(s.size() <= 5);
    }
    CHECK(total == 13);
}

TEST_CASE("by-property partition isolates flagged rows on client zero") {
    SynthSpec spec;
    spec.with_property = true;
    spec.prevalence = 0.5;
    Dataset d = synth_generate(spec, 24, 11);
    int flagged = 0;
    for (std::uint8_t f : d.property_flags) flagged += f;
    REQUIRE(flagged > 0);
    REQUIRE(flagged < 24);

    std::vector<Dataset> shards = partition(d, 3, PartitionMode::ByProperty, 8);
    int c0_flagged = 0;
    for (std::uint8_t f : shards[0].property_flags) c0_flagged += f;
    CHECK(c0_flagged == flagged);
    for (std::size_t k = 1; k < shards.size(); ++k)
        for (std::uint8_t f : shards[k].property_flags) CHECK(f == 0);
}

TEST_CASE("make_batch gathers rows with one-hot labels") {
    SynthSpec spec;
    Dataset d = synth_generate(spec, 8, 2);
    Batch b = make_batch(d, {0, 3});
    CHECK(b.size() == 2);
    CHECK(b.X.shape == std::vector<int>{2, 8, 8, 1});
    CHECK(b.Y.shape == std::vector<int>{2, 4});
    for (int i = 0; i < 64; ++i)
        CHECK(b.X.data[std::size_t(64 + i)] == d.images.data[std::size_t(3 * 64 + i)]);
}

TEST_CASE("dataset cache round-trips bitwise") {
    SynthSpec spec;
    spec.with_property = true;
    spec.prevalence = 0.5;
    Dataset d = synth_generate(spec, 10, 21);
    std::string path = temp_path("cache.bin");
    save_dataset(d, path);
    Dataset back = load_dataset(path);
    CHECK(bitwise_equal(d.images, back.images));
    CHECK(bitwise_equal(d.labels, back.labels));
    CHECK(d.property_flags == back.property_flags);
    std::remove(path.c_str());
}

TEST_CASE("cifar loader unpacks planar records") {
    // two fake CIFAR-10 records: label byte + 3072 planar RGB bytes
    std::string path = temp_path("cifar.bin");
    {
        std::ofstream os(path, std::ios::binary);
        for (int rec = 0; rec < 2; ++rec) {
            unsigned char label = rec == 0 ? 3 : 7;
            os.put(char(label));
            std::vector<unsigned char> px(3072, 0);
            if (rec == 0) {
                px[0] = 255;     // R at (0, 0)
                px[1024] = 128;  // G at (0, 0)
                px[2048 + 33] = 64;  // B at (1, 1)
            }
            os.write(reinterpret_cast<const char*>(px.data()), 3072);
        }
    }
    Dataset d = load_cifar(path, CifarVariant::Cifar10);
    CHECK(d.size() == 2);
    CHECK(d.classes() == 10);
    CHECK(d.image_shape() == std::array<int, 3>{32, 32, 3});
    CHECK(d.label_of(0) == 3);
    CHECK(d.label_of(1) == 7);
    CHECK(d.images.data[0] == doctest::Approx(1.0f));          // R(0,0)
    CHECK(d.images.data[1] == doctest::Approx(128.0f / 255));  // G(0,0)
    // B at spatial (1,1): ((1*32+1)*3 + 2)
    CHECK(d.images.data[(32 + 1) * 3 + 2] == doctest::Approx(64.0f / 255));

    // truncated file must be rejected
    {
        std::ofstream os(path, std::ios::binary);
        os.write("short", 5);
    }
    CHECK_THROWS_AS(load_cifar(path, CifarVariant::Cifar10), Error);
    std::remove(path.c_str());
}

TEST_CASE("cifar-100 records use the trailing fine label") {
    std::string path = temp_path("cifar100.bin");
    {
        std::ofstream os(path, std::ios::binary);
        os.put(char(11));  // coarse, ignored
        os.put(char(42));  // fine
        std::vector<unsigned char> px(3072, 10);
        os.write(reinterpret_cast<const char*>(px.data()), 3072);
    }
    Dataset d = load_cifar(path, CifarVariant::Cifar100);
    CHECK(d.size() == 1);
    CHECK(d.classes() == 100);
    CHECK(d.label_of(0) == 42);
    std::remove(path.c_str());
}
