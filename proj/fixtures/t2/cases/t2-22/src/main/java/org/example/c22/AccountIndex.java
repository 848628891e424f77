package org.example.c22;

import java.util.List;

public class AccountIndex {
    public static final class User {
        final String email;
        final String name;

        User(String email, String name) {
            this.email = email;
            this.name = name;
        }
    }

    private final List<User> users;

    public AccountIndex(List<User> users) {
        this.users = users;
    }

    public User byEmail(String email) {
        return users.stream().filter(u -> u.email.equals(email)).findFirst().get();
    }
}
