#include <gtest/gtest.h>

#include <cmath>

#include "roomnet/backbone.hpp"
#include "roomnet/rng.hpp"

using namespace roomnet;

namespace {

Frame frame_with_descriptors(const std::vector<std::vector<float>>& descs) {
    Frame f;
    uint32_t id = 0;
    for (const auto& d : descs) {
        Keypoint kp;
        kp.id = id++;
        kp.position = {0.5f, 0.5f};
        kp.descriptor = d;
        f.keypoints.push_back(kp);
    }
    return f;
}

// Frozen fixture: seed 42, single keypoint with descriptor e1, D=64, F=32.
// Values computed once with tests/golden/gen_backbone_golden.py.
const double kGoldenE1Feature[32] = {
    0.15894033878261613,   -0.11916742772958906, -0.25613090465080451, -0.0038197123261723021,
    0.20051732183501988,   -0.012240242954997951, 0.20629849525648858,  0.25319827002580886,
    0.18546624007123366,   -0.2303882625328596,   0.23441058352375627,  0.25771026289859666,
    0.027696908040875323,  -0.063774961540914388, -0.15256208866257853, 0.018849744914547491,
    0.068760518422459754,  -0.25250210695656705,  -0.088211584616923036, -0.080093314388009845,
    0.24236623773560154,   -0.25373257193925852,  0.19252960047428114,  0.094628322693007194,
    0.17087246190799646,   0.015987589045074468,  0.14865558839421492,  -0.20392956674407708,
    -0.16316015973608655,  -0.20841499438841699,  0.23347135431156454,  -0.20262962398230502,
};

}  // namespace

TEST(Backbone, GoldenFeatureForBasisDescriptor) {
    std::vector<float> e1(kDescriptorDim, 0.0f);
    e1[0] = 1.0f;
    const Frame f = frame_with_descriptors({e1});
    const BackboneParams b = make_backbone(42);
    const FrameFeature feat = extract_feature(f, b);
    ASSERT_EQ(feat.v.size(), kFeatureDim);
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
        EXPECT_NEAR(feat.v[i], kGoldenE1Feature[i], 1e-15) << "component " << i;
    }
}

TEST(Backbone, DeterministicAcrossCalls) {
    SplitMix64 rng(7);
    std::vector<std::vector<float>> descs;
    for (int i = 0; i < 5; ++i) {
        auto d = rng.unit_vector(kDescriptorDim);
        descs.emplace_back(d.begin(), d.end());
    }
    const Frame f = frame_with_descriptors(descs);
    const BackboneParams b = make_backbone();
    const FrameFeature a = extract_feature(f, b);
    const FrameFeature c = extract_feature(f, b);
    EXPECT_EQ(a.v, c.v);  // bitwise
}

TEST(Backbone, OutputIsUnitNorm) {
    SplitMix64 rng(99);
    const BackboneParams b = make_backbone();
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<std::vector<float>> descs;
        const std::size_t n = 1 + rng.next() % 20;
        for (std::size_t i = 0; i < n; ++i) {
            auto d = rng.unit_vector(kDescriptorDim);
            descs.emplace_back(d.begin(), d.end());
        }
        const FrameFeature feat = extract_feature(frame_with_descriptors(descs), b);
        EXPECT_NEAR(norm2(feat.v), 1.0, 1e-6);
    }
}

TEST(Backbone, EmptyFrameThrows) {
    const Frame f;
    const BackboneParams b = make_backbone();
    EXPECT_THROW(extract_feature(f, b), std::invalid_argument);
}

TEST(Backbone, DegenerateMeanFallsBackToFixedUnit) {
    // Two opposite descriptors cancel to a zero mean.
    std::vector<float> d1(kDescriptorDim, 0.0f), d2(kDescriptorDim, 0.0f);
    d1[3] = 1.0f;
    d2[3] = -1.0f;
    const FrameFeature feat = extract_feature(frame_with_descriptors({d1, d2}), make_backbone());
    EXPECT_DOUBLE_EQ(feat.v[0], 1.0);
    EXPECT_NEAR(norm2(feat.v), 1.0, 1e-12);
}

TEST(Backbone, DifferentSeedsGiveDifferentProjections) {
    const BackboneParams a = make_backbone(1);
    const BackboneParams b = make_backbone(2);
    EXPECT_NE(a.projection.a, b.projection.a);
}
