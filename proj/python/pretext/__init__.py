# Copyright 2026 The pretext Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Federated differentially private synthetic text generation."""

from pretext._pretext import (
    ConfigError,
    Error,
    InvalidArgumentError,
    account_sigma,
    build_prompt,
    calibrate_sigma,
    dp_histogram_round,
    embed,
    markov_generate,
    parse_generation,
    run,
    sample_survivors,
    threshold,
    tokenize,
    vary,
)

__all__ = [
    "ConfigError",
    "Error",
    "InvalidArgumentError",
    "account_sigma",
    "build_prompt",
    "calibrate_sigma",
    "dp_histogram_round",
    "embed",
    "markov_generate",
    "parse_generation",
    "run",
    "sample_survivors",
    "threshold",
    "tokenize",
    "vary",
]
