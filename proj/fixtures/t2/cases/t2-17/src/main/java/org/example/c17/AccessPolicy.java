package org.example.c17;

public class AccessPolicy {
    private final String mode;

    public AccessPolicy(String mode) {
        this.mode = mode;
    }

    public boolean isStrict() {
        return mode == "strict";
    }

    public String describe() {
        return isStrict() ? "strict mode" : "lenient mode";
    }
}
