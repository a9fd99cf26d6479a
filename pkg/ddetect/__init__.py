"""D-detectability verification toolkit for partially observed discrete event systems."""
