#include "gradsec/data.hpp"

#include <algorithm>
#include <cmath>

#include "bytes.hpp"
#include "gradsec/error.hpp"
#include "gradsec/rng.hpp"

namespace gradsec {

std::array<int, 3> Dataset::image_shape() const {
    if (images.shape.size() != 4) fail("dataset images must be (N, h, w, c)");
    return {images.shape[1], images.shape[2], images.shape[3]};
}

int Dataset::label_of(int row) const {
    int c = classes();
    const float* r = labels.data.data() + std::size_t(row) * c;
    int best = 0;
    for (int j = 1; j < c; ++j)
        if (r[j] > r[best]) best = j;
    return best;
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
    std::array<int, 3> s = image_shape();
    std::size_t px = std::size_t(s[0]) * s[1] * s[2];
    Dataset out;
    out.images = Tensor({int(rows.size()), s[0], s[1], s[2]});
    out.labels = Tensor({int(rows.size()), classes()});
    if (has_property()) out.property_flags.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        int r = rows[i];
        if (r < 0 || r >= size()) fail("dataset subset: row " + std::to_string(r) + " out of range");
        std::copy_n(images.data.data() + std::size_t(r) * px, px,
                    out.images.data.data() + i * px);
        std::copy_n(labels.data.data() + std::size_t(r) * classes(), classes(),
                    out.labels.data.data() + i * classes());
        if (has_property()) out.property_flags[i] = property_flags[r];
    }
    return out;
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
    if (a.size() == 0) return b;
    if (b.size() == 0) return a;
    if (a.image_shape() != b.image_shape() || a.classes() != b.classes())
        fail("dataset concat: incompatible shapes");
    if (a.has_property() != b.has_property()) fail("dataset concat: property flags mismatch");
    Dataset out;
    std::array<int, 3> s = a.image_shape();
    out.images = Tensor({a.size() + b.size(), s[0], s[1], s[2]});
    out.labels = Tensor({a.size() + b.size(), a.classes()});
    std::copy(a.images.data.begin(), a.images.data.end(), out.images.data.begin());
    std::copy(b.images.data.begin(), b.images.data.end(),
              out.images.data.begin() + a.images.data.size());
    std::copy(a.labels.data.begin(), a.labels.data.end(), out.labels.data.begin());
    std::copy(b.labels.data.begin(), b.labels.data.end(),
              out.labels.data.begin() + a.labels.data.size());
    if (a.has_property()) {
        out.property_flags = a.property_flags;
        out.property_flags.insert(out.property_flags.end(), b.property_flags.begin(),
                                  b.property_flags.end());
    }
    return out;
}

void SynthSpec::validate() const {
    if (classes < 2) fail("synth spec: classes must be >= 2");
    if (height <= 0 || width <= 0 || channels <= 0)
        fail("synth spec: image dimensions must be positive");
    if (noise_sigma < 0.0) fail("synth spec: noise_sigma must be >= 0");
    if (with_property) {
        if (blend < 0.0 || blend > 1.0) fail("synth spec: blend must lie in [0, 1]");
        if (prevalence < 0.0 || prevalence > 1.0)
            fail("synth spec: prevalence must lie in [0, 1]");
        if (!pattern.empty() && pattern.shape != std::vector<int>{height, width, channels})
            fail("synth spec: pattern shape " + shape_str(pattern.shape) +
                 " does not match image shape");
    }
}

Tensor default_property_pattern(int h, int w, int c) {
    // 2x2 checkerboard; a crisp, spatially-structured signature
    Tensor p({h, w, c});
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            float v = ((y / 2 + x / 2) % 2 == 0) ? 1.0f : 0.0f;
            for (int ch = 0; ch < c; ++ch) p.data[(std::size_t(y) * w + x) * c + ch] = v;
        }
    return p;
}

Dataset synth_generate(const SynthSpec& spec, int n, std::uint64_t seed) {
    spec.validate();
    if (n <= 0) fail("synth_generate: n must be positive");
    std::size_t px = std::size_t(spec.height) * spec.width * spec.channels;

    // class prototypes depend only on prototype_seed, so every party that
    // shares the spec sees the same underlying distribution
    std::vector<std::vector<float>> protos(spec.classes);
    for (int c = 0; c < spec.classes; ++c) {
        Rng prng = derive_rng(spec.prototype_seed, kStreamData, std::uint64_t(c));
        protos[c].resize(px);
        for (std::size_t i = 0; i < px; ++i) protos[c][i] = float(prng.uniform());
    }
    Tensor pattern;
    if (spec.with_property)
        pattern = spec.pattern.empty()
                      ? default_property_pattern(spec.height, spec.width, spec.channels)
                      : spec.pattern;

    Dataset d;
    d.images = Tensor({n, spec.height, spec.width, spec.channels});
    d.labels = Tensor({n, spec.classes});
    if (spec.with_property) d.property_flags.assign(std::size_t(n), 0);

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng shuffle_rng = derive_rng(seed, kStreamData, 0xa11);
    shuffle_rng.shuffle(order);

    for (int row = 0; row < n; ++row) {
        int cls = order[row] % spec.classes;  // balanced classes in shuffled order
        Rng rng = derive_rng(seed, kStreamData, 0xb22, std::uint64_t(order[row]));
        float* img = d.images.data.data() + std::size_t(row) * px;
        for (std::size_t i = 0; i < px; ++i) {
            double v = double(protos[cls][i]) + spec.noise_sigma * rng.normal();
            img[i] = float(std::clamp(v, 0.0, 1.0));
        }
        if (spec.with_property && rng.uniform() < spec.prevalence) {
            d.property_flags[std::size_t(row)] = 1;
            for (std::size_t i = 0; i < px; ++i)
                img[i] = float((1.0 - spec.blend) * double(img[i]) +
                               spec.blend * double(pattern.data[i]));
        }
        d.labels.data[std::size_t(row) * spec.classes + cls] = 1.0f;
    }
    return d;
}

Dataset load_cifar(const std::string& path, CifarVariant variant) {
    std::ifstream is = detail::open_in(path);
    const std::string what = "cifar file '" + path + "'";
    int label_bytes = variant == CifarVariant::Cifar10 ? 1 : 2;
    int classes = variant == CifarVariant::Cifar10 ? 10 : 100;
    const std::size_t record = std::size_t(label_bytes) + 3072;

    is.seekg(0, std::ios::end);
    std::size_t bytes = std::size_t(is.tellg());
    is.seekg(0);
    if (bytes == 0 || bytes % record != 0)
        fail(what + ": size " + std::to_string(bytes) + " is not a multiple of the " +
             std::to_string(record) + "-byte record");
    int n = int(bytes / record);

    Dataset d;
    d.images = Tensor({n, 32, 32, 3});
    d.labels = Tensor({n, classes});
    std::vector<unsigned char> buf(record);
    for (int r = 0; r < n; ++r) {
        is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(record));
        if (!is) fail(what + ": unexpected end of file");
        // CIFAR-100 records carry (coarse, fine); the fine label is last
        int label = buf[label_bytes - 1];
        if (label >= classes) fail(what + ": record " + std::to_string(r) + " has label " +
                                   std::to_string(label) + " >= " + std::to_string(classes));
        d.labels.data[std::size_t(r) * classes + label] = 1.0f;
        // planar RGB -> interleaved NHWC, scaled to [0, 1]
        const unsigned char* px = buf.data() + label_bytes;
        float* img = d.images.data.data() + std::size_t(r) * 3072;
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x)
                for (int c = 0; c < 3; ++c)
                    img[(std::size_t(y) * 32 + x) * 3 + c] =
                        float(px[std::size_t(c) * 1024 + std::size_t(y) * 32 + x]) / 255.0f;
    }
    return d;
}

PartitionMode partition_mode_from_string(const std::string& name) {
    if (name == "iid") return PartitionMode::Iid;
    if (name == "by_property") return PartitionMode::ByProperty;
    fail("unknown partition mode '" + name + "' (expected iid|by_property)");
}

const char* to_string(PartitionMode mode) {
    return mode == PartitionMode::Iid ? "iid" : "by_property";
}

std::vector<Dataset> partition(const Dataset& d, int k, PartitionMode mode, std::uint64_t seed) {
    if (k <= 0) fail("partition: client count must be positive");
    if (d.size() < k) fail("partition: fewer rows than clients");
    std::vector<std::vector<int>> shard(k);
    if (mode == PartitionMode::Iid) {
        std::vector<int> order(d.size());
        for (int i = 0; i < d.size(); ++i) order[i] = i;
        Rng rng = derive_rng(seed, kStreamPartition);
        rng.shuffle(order);
        for (int i = 0; i < d.size(); ++i) shard[i % k].push_back(order[i]);
    } else {
        if (!d.has_property()) fail("partition: by_property needs property flags");
        std::vector<int> rest;
        for (int i = 0; i < d.size(); ++i)
            (d.property_flags[std::size_t(i)] ? shard[0] : rest).push_back(i);
        if (shard[0].empty()) fail("partition: by_property found no flagged rows");
        if (k == 1) {
            shard[0].insert(shard[0].end(), rest.begin(), rest.end());
        } else {
            Rng rng = derive_rng(seed, kStreamPartition);
            rng.shuffle(rest);
            for (std::size_t i = 0; i < rest.size(); ++i)
                shard[1 + int(i % std::size_t(k - 1))].push_back(rest[i]);
        }
    }
    std::vector<Dataset> out;
    for (int c = 0; c < k; ++c) {
        if (shard[c].empty()) fail("partition: client " + std::to_string(c) + " received no rows");
        std::sort(shard[c].begin(), shard[c].end());
        out.push_back(d.subset(shard[c]));
    }
    return out;
}

void save_dataset(const Dataset& d, const std::string& path) {
    if (d.classes() > 255) fail("dataset cache supports at most 255 classes");
    std::ofstream os = detail::open_out(path);
    std::array<int, 3> s = d.image_shape();
    detail::put_u32(os, std::uint32_t(d.size()));
    detail::put_u32(os, std::uint32_t(s[0]));
    detail::put_u32(os, std::uint32_t(s[1]));
    detail::put_u32(os, std::uint32_t(s[2]));
    detail::put_u32(os, std::uint32_t(d.classes()));
    detail::put_u32(os, d.has_property() ? 1 : 0);
    detail::put_f32_array(os, d.images.data.data(), d.images.size());
    for (int r = 0; r < d.size(); ++r) detail::put_u8(os, std::uint8_t(d.label_of(r)));
    if (d.has_property())
        for (std::uint8_t f : d.property_flags) detail::put_u8(os, f ? 1 : 0);
    if (!os) fail("write failed for '" + path + "'");
}

Dataset load_dataset(const std::string& path) {
    std::ifstream is = detail::open_in(path);
    const std::string what = "dataset cache '" + path + "'";
    std::uint32_t n = detail::get_u32(is, what);
    std::uint32_t h = detail::get_u32(is, what);
    std::uint32_t w = detail::get_u32(is, what);
    std::uint32_t c = detail::get_u32(is, what);
    std::uint32_t classes = detail::get_u32(is, what);
    std::uint32_t has_prop = detail::get_u32(is, what);
    if (n == 0 || h == 0 || w == 0 || c == 0 || classes < 2 || has_prop > 1)
        fail(what + ": implausible header");
    Dataset d;
    d.images = Tensor({int(n), int(h), int(w), int(c)});
    d.labels = Tensor({int(n), int(classes)});
    detail::get_f32_array(is, d.images.data.data(), d.images.size(), what);
    for (std::uint32_t r = 0; r < n; ++r) {
        std::uint8_t label = detail::get_u8(is, what);
        if (label >= classes) fail(what + ": row " + std::to_string(r) + " label out of range");
        d.labels.data[std::size_t(r) * classes + label] = 1.0f;
    }
    if (has_prop) {
        d.property_flags.resize(n);
        for (std::uint32_t r = 0; r < n; ++r) d.property_flags[r] = detail::get_u8(is, what);
    }
    return d;
}

Batch make_batch(const Dataset& d, const std::vector<int>& rows) {
    if (rows.empty()) fail("make_batch: empty row list");
    Dataset sub = d.subset(rows);
    Batch b;
    b.X = std::move(sub.images);
    b.Y = std::move(sub.labels);
    return b;
}

}  // namespace gradsec
