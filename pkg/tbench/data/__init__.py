# SP Few-Shot - Data Tests
