# SP Few-Shot - Acceptance Tests
