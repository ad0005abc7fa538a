#
# SP Few-Shot - Command Line Tools
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Click CLI, exporters, run manifests and the rich live view.
#
