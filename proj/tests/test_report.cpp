/*
 * SPDX-FileCopyrightText: Copyright 2026 The scnn-lab authors
 * SPDX-License-Identifier: Apache-2.0
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
#include <gtest/gtest.h>

#include "scnn/plot.hpp"
#include "scnn/report_io.hpp"

using namespace scnn;

namespace {

std::vector<CorrelationCurve> sample_curves() {
    return {{0.5, {0.1, -0.8, 0.3}, 1, 0.8}, {1.25, {0.05, 0.2, -0.1}, 1, 0.2}, {-3.1, {1.0 / 3, 0.0, 0.0}, 0, 1.0 / 3}};
}

} // namespace

TEST(Csv, Roundtrip) {
    const auto c = sample_curves();
    const auto back = curves_from_csv(curves_to_csv(c));
    ASSERT_EQ(back.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(back[i].hypothesis, c[i].hypothesis);
        EXPECT_EQ(back[i].rho, c[i].rho);
        EXPECT_EQ(back[i].peak_sample, c[i].peak_sample);
        EXPECT_EQ(back[i].peak, c[i].peak);
    }
}

TEST(Csv, FirstSampleOffset) {
    const auto text = curves_to_csv({sample_curves()[0]}, 40);
    EXPECT_NE(text.find("\n0.5,41,"), std::string::npos);
}

TEST(Csv, RejectsGarbage) {
    EXPECT_THROW(curves_from_csv("a,b\n1,2\n"), ValidationError);
    EXPECT_THROW(curves_from_csv("hypothesis,sample,rho\n1,x,3\n"), ValidationError);
    EXPECT_TRUE(curves_from_csv("hypothesis,sample,rho\n").empty());
}

TEST(Svg, CorrelationChart) {
    ChartOptions o;
    o.title = "rho <byte 2>";
    const auto svg = correlation_svg(sample_curves(), o, 1);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(svg.find("rho &lt;byte 2&gt;"), std::string::npos);
    EXPECT_NE(svg.find("#c0392b"), std::string::npos);
    std::size_t paths = 0;
    for (std::size_t p = svg.find("<path d=\"M"); p != std::string::npos; p = svg.find("<path d=\"M", p + 1))
        ++paths;
    EXPECT_EQ(paths, 4u); // axes + three curves
}

TEST(Svg, HistogramAndErrors) {
    const auto svg = histogram_svg({1, 2, 2, 3, 3, 3}, 3, {});
    std::size_t bars = 0;
    for (std::size_t p = svg.find("fill=\"#2e86c1\""); p != std::string::npos; p = svg.find("fill=\"#2e86c1\"", p + 1))
        ++bars;
    EXPECT_EQ(bars, 3u);
    EXPECT_THROW(histogram_svg({}, 3, {}), UsageError);
    EXPECT_THROW(histogram_svg({1.0}, 0, {}), UsageError);
    EXPECT_THROW(line_chart_svg({}, {}), UsageError);
    EXPECT_THROW(line_chart_svg({Series{"s", {1, 2}, {1}, false}}, {}), UsageError);
}

TEST(Report, WeightEstimateJson) {
    WeightEstimate e;
    e.value = 2.43f;
    e.precision = WeightPrecision::Full;
    e.conclusive = true;
    e.stage1 = {{1.0, 0.9, 2, true}};
    const auto j = weight_estimate_to_json(e);
    EXPECT_EQ(j["value"].get<float>(), 2.43f);
    EXPECT_EQ(j["precision"], "full");
    EXPECT_EQ(j["stage1"].size(), 1u);
}

TEST(Report, DegradationJson) {
    EvaluationOptions o;
    o.trials = 2;
    o.traces = 50;
    o.attacks = {AttackKind::CpaWindow};
    CountermeasureConfig cm;
    cm.shuffle = true;
    const auto j = degradation_to_json(evaluate(cm, o));
    EXPECT_EQ(j["attacks"].size(), 1u);
    EXPECT_EQ(j["attacks"][0]["attack"], "cpa-window");
    EXPECT_TRUE(j["countermeasures"]["shuffle"].get<bool>());
}
