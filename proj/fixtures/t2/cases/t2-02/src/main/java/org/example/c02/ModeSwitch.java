package org.example.c02;

public class ModeSwitch {
    private final String mode;

    public ModeSwitch(String mode) {
        this.mode = mode;
    }

    public boolean isStrict() {
        return mode == "strict";
    }

    public String describe() {
        return isStrict() ? "strict mode" : "lenient mode";
    }
}
