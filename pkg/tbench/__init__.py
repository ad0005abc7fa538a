# SP Few-Shot - Test Package
